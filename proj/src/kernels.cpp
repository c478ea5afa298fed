#include "ehh/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ehh::kernels {

namespace {

constexpr double kPi = std::numbers::pi;
// exp(-690) ~ 2e-300
constexpr double kFlush = 690.0;

}  // namespace

KappaPoint::KappaPoint(double k) : kappa(k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("kappa must be positive");
  bk = k / (2.0 * std::sqrt(4.0 * kPi));
  const double a = k / std::sqrt(2.0 * kPi);
  const double b = k * k / (8.0 * kPi);
  kappa_tilde = (std::sqrt(kPi) / 2.0) * (k / 4.0) * a * a * b * b;
}

double gauss1(double kappa, double a, double b) {
  const double d = a - b;
  const double e = kappa * kappa * d * d / 8.0;
  if (e > kFlush) return 0.0;
  return std::exp(-e);
}

double halfint(double kappa, double a, double b) {
  return std::sqrt(2.0 * kPi) / kappa * std::erf(kappa * (a - b) / (2.0 * std::numbers::sqrt2));
}

double pairing_axis(const Vec4& x, const Vec4& y, int k, double kappa) {
  if (k < 1 || k > 3) throw std::invalid_argument("pairing axis must be 1..3");
  double d2 = 0.0;
  for (int i = 1; i <= 3; ++i) {
    if (i == k) continue;
    d2 += (x[i] - y[i]) * (x[i] - y[i]);
  }
  const double e = kappa * kappa * d2 / 8.0;
  if (e > kFlush) return 0.0;
  return std::exp(-e) * kappa * halfint(kappa, x[k], y[k]) * -halfint(kappa, x[0], y[0]);
}

double dzero_pair(const Vec4& x, const Vec4& y, double kappa) {
  double d2 = 0.0;
  for (int i = 1; i <= 3; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  const double e = kappa * kappa * d2 / 8.0;
  if (e > kFlush) return 0.0;
  return -halfint(kappa, x[0], y[0]) * std::exp(-e);
}

double mixed_pair(const Vec4& x, const Vec4& y, std::optional<Inversion> a,
                  std::optional<Inversion> b, double kappa) {
  std::array<int, 4> mark{};  // 0 none, 1 first slot, 2 second slot
  for (const auto& inv : {a, b}) {
    if (!inv) continue;
    if (inv->axis < 0 || inv->axis > 3) throw std::invalid_argument("inversion axis must be 0..3");
    auto& m = mark[static_cast<std::size_t>(inv->axis)];
    if (m != 0) throw std::invalid_argument("two inversions on one axis");
    m = inv->slot == Slot::first ? 1 : 2;
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    if (mark[i] == 0) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  const double e = kappa * kappa * d2 / 8.0;
  if (e > kFlush) return 0.0;
  double out = std::exp(-e);
  for (std::size_t i = 0; i < 4; ++i) {
    if (mark[i] == 1) out *= -halfint(kappa, x[i], y[i]);
    if (mark[i] == 2) out *= halfint(kappa, x[i], y[i]);
  }
  return out;
}

}  // namespace ehh::kernels
