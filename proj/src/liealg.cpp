#include "ehh/liealg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace ehh::liealg {

namespace {

constexpr Complex kI{0.0, 1.0};

}  // namespace

SpinRep::SpinRep(int two_j) : two_j_(two_j) {
  if (two_j < 0 || two_j > kMaxTwoJ) {
    throw std::invalid_argument("spin 2j=" + std::to_string(two_j) +
                                " outside [0, " + std::to_string(kMaxTwoJ) + "]");
  }
  const int n = dim();
  const double j = spin();

  // Basis |m>, m = j, j-1, ..., -j (index a <-> m = j - a).
  Matrix jz = Matrix::Zero(n, n);
  Matrix jp = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const double m = j - a;
    jz(a, a) = m;
    if (a > 0) {
      // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>
      jp(a - 1, a) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
  }
  const Matrix jm = jp.adjoint();
  const Matrix jx = 0.5 * (jp + jm);
  const Matrix jy = (-0.5 * kI) * (jp - jm);

  gens_[0] = -kI * jx;
  gens_[1] = -kI * jy;
  gens_[2] = -kI * jz;

  const Matrix h = kI * element_E();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  spectrum_.assign(ev.data(), ev.data() + ev.size());
  std::sort(spectrum_.begin(), spectrum_.end());
}

const Matrix& SpinRep::generator(int k) const {
  if (k < 1 || k > 3) throw std::invalid_argument("generator index must be 1..3");
  return gens_[static_cast<std::size_t>(k - 1)];
}

Matrix SpinRep::element_E() const { return gens_[0] + gens_[1] + gens_[2]; }

int doubled_spin(double j) {
  const double twice = 2.0 * j;
  const double rounded = std::round(twice);
  if (!std::isfinite(j) || j < 0.0 || std::abs(twice - rounded) > 1e-12) {
    throw std::invalid_argument("spin must be a nonnegative half-integer, got " +
                                std::to_string(j));
  }
  const int two_j = static_cast<int>(rounded);
  if (two_j > kMaxTwoJ) {
    throw std::invalid_argument("spin above the supported cap j=25: " + std::to_string(j));
  }
  return two_j;
}

SpinRep build_generators(double j) { return SpinRep(doubled_spin(j)); }

std::vector<double> spectrum_iE(const SpinRep& rep) {
  return {rep.spectrum().begin(), rep.spectrum().end()};
}

const SpinRep& cached_rep(int two_j) {
  static std::mutex mu;
  static std::array<std::unique_ptr<const SpinRep>, kMaxTwoJ + 1> cache;
  if (two_j < 0 || two_j > kMaxTwoJ) {
    throw std::invalid_argument("spin 2j=" + std::to_string(two_j) + " out of range");
  }
  std::lock_guard lock(mu);
  auto& slot = cache[static_cast<std::size_t>(two_j)];
  if (!slot) slot = std::make_unique<const SpinRep>(two_j);
  return *slot;
}

Complex trace_exp(const SpinRep& rep, Complex theta) {
  // eigenvalues of rho(E) are mu = -i * lambda
  Complex sum{0.0, 0.0};
  for (double lambda : rep.spectrum()) sum += std::exp(-kI * lambda * theta);
  return sum;
}

Complex trace_exp(double j, Complex theta) {
  return trace_exp(cached_rep(doubled_spin(j)), theta);
}

Complex trace_exp_matrix_oracle(const SpinRep& rep, Complex theta) {
  const Matrix a = theta * rep.element_E();
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix b = a / std::ldexp(1.0, squarings);

  const auto n = b.rows();
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 24; ++k) {
    term = term * b / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result.trace();
}

Complex trace_exp_matrix_oracle(double j, Complex theta) {
  return trace_exp_matrix_oracle(cached_rep(doubled_spin(j)), theta);
}

double trace_exp_i_cosh_form(const SpinRep& rep) {
  double sum = (rep.dim() % 2 == 1) ? 1.0 : 0.0;
  for (double lambda : rep.spectrum()) {
    if (lambda > 1e-9) sum += 2.0 * std::cosh(lambda);
  }
  return sum;
}

Matrix upsilon_commutator_sum(const SpinRep& rep) {
  auto comm = [&](int a, int b) {
    const Matrix& x = rep.generator(a);
    const Matrix& y = rep.generator(b);
    return Matrix(x * y - y * x);
  };
  return comm(2, 3) + comm(3, 1) + comm(1, 2);
}

}  // namespace ehh::liealg
