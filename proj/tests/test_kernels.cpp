#include "ehh/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ehh::kernels;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kPi = std::numbers::pi;

double qk(double kappa, double x, double t) {
  return std::sqrt(kappa) / std::pow(2 * kPi, 0.25) * std::exp(-kappa * kappa * (t - x) * (t - x) / 4);
}

// Gaussian support half-width
double reach(double kappa) { return 14.0 / kappa; }

double gk(const std::function<double(double)>& f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
}

double oracle_gauss1(double kappa, double a, double b) {
  const double lo = std::min(a, b) - reach(kappa), hi = std::max(a, b) + reach(kappa);
  return gk([&](double t) { return qk(kappa, a, t) * qk(kappa, b, t); }, lo, hi);
}

// d^-1 q^b at x = int_{-inf}^x q^b - (1/2) int q^b
double inv_q(double kappa, double b, double x) {
  const double total = gk([&](double t) { return qk(kappa, b, t); }, b - reach(kappa), b + reach(kappa));
  const double lo = b - reach(kappa);
  const double part = x <= lo ? 0.0 : gk([&](double t) { return qk(kappa, b, t); }, lo, std::min(x, b + reach(kappa)));
  return part - 0.5 * total;
}

// <q^a, d^-1 q^b> by nested quadrature of the defining integral
double oracle_halfint(double kappa, double a, double b) {
  return gk([&](double x) { return qk(kappa, a, x) * inv_q(kappa, b, x); }, a - reach(kappa), a + reach(kappa));
}

}  // namespace

TEST_CASE("kappa point constants") {
  for (double k : {0.5, 5.0, 40.0}) {
    const KappaPoint kp(k);
    CHECK(kp.bk == doctest::Approx(k / (2 * std::sqrt(4 * kPi))).epsilon(1e-15));
    const double kt = std::sqrt(kPi) / 2 * (k / 4) * std::pow(k / std::sqrt(2 * kPi), 2) *
                      std::pow(k * k / (8 * kPi), 2);
    CHECK(kp.kappa_tilde == doctest::Approx(kt).epsilon(1e-15));
  }
  CHECK_THROWS_AS(KappaPoint(0.0), std::invalid_argument);
}

TEST_CASE("gauss1 closed form") {
  CHECK(gauss1(2, 0, 0) == 1.0);
  CHECK(gauss1(2, 0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(gauss1(3.3, 0.2, -0.7) == gauss1(3.3, -0.7, 0.2));
  CHECK(gauss1(5, 0, 10) < 1e-100);
  CHECK(gauss1(5, 0, 20) == 0.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double k : {2.0, 6.0}) {
    for (int n = 0; n < 20; ++n) {
      const double a = u(rng), b = u(rng);
      CHECK(std::abs(gauss1(k, a, b) - oracle_gauss1(k, a, b)) < 1e-6);
      const double h = 1e-5;
      const double fd = (gauss1(k, a + h, b) - gauss1(k, a - h, b)) / (2 * h);
      const double an = -k * k * (a - b) / 4 * gauss1(k, a, b);
      CHECK(std::abs(fd - an) < 1e-6);
    }
  }
}

TEST_CASE("halfint against the defining double integral") {
  CHECK(halfint(3, 0.4, 0.4) == 0.0);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double k : {2.0, 6.0}) {
    for (int n = 0; n < 20; ++n) {
      const double a = u(rng), b = u(rng);
      CHECK(std::abs(halfint(k, a, b) - oracle_halfint(k, a, b)) < 1e-6);
      CHECK(halfint(k, a, b) == -halfint(k, b, a));
    }
  }
  CHECK(std::abs(halfint(4, 1, 0) - oracle_halfint(4, 1, 0)) < 1e-8);
}

TEST_CASE("halfint sign limit") {
  for (double d : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(50 / std::sqrt(2 * kPi) * halfint(50, d, 0) - 1.0) < 1e-3);
    CHECK(std::abs(50 / std::sqrt(2 * kPi) * halfint(50, 0, d) + 1.0) < 1e-3);
  }
}

TEST_CASE("pairing_axis against per-axis quadrature") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  const double k = 6.0;
  for (int n = 0; n < 5; ++n) {
    const Vec4 x{u(rng), u(rng), u(rng), u(rng)}, y{u(rng), u(rng), u(rng), u(rng)};
    for (int ax = 1; ax <= 3; ++ax) {
      // time: <d^-1 q^x0, q^y0> = -<q^x0, d^-1 q^y0>
      double want = -oracle_halfint(k, x[0], y[0]);
      for (int i = 1; i <= 3; ++i)
        want *= i == ax ? k * oracle_halfint(k, x[i], y[i]) : oracle_gauss1(k, x[i], y[i]);
      CHECK(std::abs(pairing_axis(x, y, ax, k) - want) < 1e-6);
      CHECK(pairing_axis(y, x, ax, k) == doctest::Approx(pairing_axis(x, y, ax, k)));
    }
  }
  const Vec4 p{0.1, 0.2, 0.3, 0.4};
  CHECK(pairing_axis(p, p, 2, 6.0) == 0.0);
  CHECK_THROWS_AS(pairing_axis(p, p, 0, 6.0), std::invalid_argument);
}

TEST_CASE("pairing_axis sign limit") {
  // x above y on axis k and in time: the two antiderivative factors give -1
  const Vec4 x{0.5, 0.0, 1.0, 0.0}, y{0.0, 0.0, 0.0, 0.0};
  for (double k : {20.0, 60.0}) {
    const double scaled = k / (2 * kPi) * pairing_axis(x, y, 2, k);
    CHECK(std::abs(scaled + 1.0) < 1e-3);
  }
  const Vec4 x2{-0.5, 0.0, 1.0, 0.0};
  CHECK(std::abs(60 / (2 * kPi) * pairing_axis(x2, y, 2, 60) - 1.0) < 1e-3);
}

TEST_CASE("dzero_pair") {
  const Vec4 x{0.2, 0.1, -0.3, 0.5};
  Vec4 y = x;
  CHECK(dzero_pair(x, y, 6) == 0.0);
  y = {0.0, 10.0, 0.0, 0.0};
  CHECK(std::abs(dzero_pair({0.3, 0, 0, 0}, y, 5)) < 1e-100);
  CHECK(dzero_pair({0.3, 0, 0, 0}, {0.0, 20.0, 0.0, 0.0}, 5) == 0.0);
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int n = 0; n < 5; ++n) {
    const Vec4 a{u(rng), u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng), u(rng)};
    double want = -oracle_halfint(6, a[0], b[0]);
    for (int i = 1; i <= 3; ++i) want *= oracle_gauss1(6, a[i], b[i]);
    CHECK(std::abs(dzero_pair(a, b, 6) - want) < 1e-6);
  }
}

TEST_CASE("mixed_pair") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int n = 0; n < 5; ++n) {
    const Vec4 a{u(rng), u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng), u(rng)};
    double g = 1;
    for (int i = 0; i < 4; ++i) g *= gauss1(6, a[i], b[i]);
    CHECK(mixed_pair(a, b, std::nullopt, std::nullopt, 6) == doctest::Approx(g));
    CHECK(mixed_pair(a, b, Inversion{0, Slot::first}, std::nullopt, 6) ==
          doctest::Approx(dzero_pair(a, b, 6)).epsilon(1e-14));
    const double m = mixed_pair(a, b, Inversion{0, Slot::first}, Inversion{2, Slot::second}, 6);
    const double want = -oracle_halfint(6, a[0], b[0]) * oracle_gauss1(6, a[1], b[1]) *
                        oracle_halfint(6, a[2], b[2]) * oracle_gauss1(6, a[3], b[3]);
    CHECK(std::abs(m - want) < 1e-6);
    // moving the inversion to the other slot flips the sign
    CHECK(mixed_pair(a, b, Inversion{1, Slot::first}, std::nullopt, 6) ==
          -mixed_pair(a, b, Inversion{1, Slot::second}, std::nullopt, 6));
  }
  const Vec4 z{};
  CHECK_THROWS_AS(mixed_pair(z, z, Inversion{1, Slot::first}, Inversion{1, Slot::second}, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(mixed_pair(z, z, Inversion{4, Slot::first}, std::nullopt, 2), std::invalid_argument);
}
