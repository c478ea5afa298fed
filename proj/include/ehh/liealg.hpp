// Irreducible representations of su(2) x su(2) and holonomy traces.
//
// Generators follow e_k = -i J_k with the standard angular-momentum
// matrices J_k, so that [e_1, e_2] = e_3 (and cyclic), each e_k is
// skew-Hermitian and sum_k e_k e_k = -j(j+1) I.
//
// The distinguished element E = e_1 + e_2 + e_3 is the only direction
// that appears in the limiting holonomy exponents; i*rho(E) is Hermitian
// with spectrum sqrt(3) * {-j, ..., j}.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace ehh::liealg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Largest supported doubled spin 2j.
inline constexpr int kMaxTwoJ = 50;

/// Spin-j irreducible representation of su(2), stored with its generators
/// and the cached spectrum of i*rho(e_1 + e_2 + e_3).
class SpinRep {
 public:
  /// Builds the representation with doubled spin `two_j` (= 2j).
  /// Throws std::invalid_argument when two_j is negative or above kMaxTwoJ.
  explicit SpinRep(int two_j);

  int two_j() const { return two_j_; }
  double spin() const { return 0.5 * two_j_; }
  int dim() const { return two_j_ + 1; }
  /// xi = j(j+1).
  double casimir() const { return spin() * (spin() + 1.0); }

  /// rho(e_k) for k = 1, 2, 3.
  const Matrix& generator(int k) const;
  /// rho(E) = rho(e_1) + rho(e_2) + rho(e_3).
  Matrix element_E() const;
  /// Sorted eigenvalues of i*rho(E).
  std::span<const double> spectrum() const { return spectrum_; }

 private:
  int two_j_;
  std::array<Matrix, 3> gens_;
  std::vector<double> spectrum_;
};

/// Pair of spins (j+, j-) carried by a matter loop. Stored doubled.
struct ColoredRep {
  int jplus2 = 0;
  int jminus2 = 0;

  double jplus() const { return 0.5 * jplus2; }
  double jminus() const { return 0.5 * jminus2; }
  double xi_plus() const { return jplus() * (jplus() + 1.0); }
  double xi_minus() const { return jminus() * (jminus() + 1.0); }

  friend bool operator==(const ColoredRep&, const ColoredRep&) = default;
};

/// Coefficients of an element c+ F+ + c- F- of su(2) x su(2).
struct AlgebraCoeff {
  Complex cplus{0.0, 0.0};
  Complex cminus{0.0, 0.0};
};

/// Throws std::invalid_argument unless 2j is a nonnegative integer <= kMaxTwoJ.
int doubled_spin(double j);

SpinRep build_generators(double j);

/// Sorted eigenvalues of i*rho(E); symmetric under negation.
std::vector<double> spectrum_iE(const SpinRep& rep);

/// Shared immutable representation for doubled spin `two_j`.
const SpinRep& cached_rep(int two_j);

/// Tr rho(exp(theta * E)) from the cached spectrum: sum over lambda of
/// exp(-i * theta * lambda).
Complex trace_exp(const SpinRep& rep, Complex theta);
Complex trace_exp(double j, Complex theta);

/// Independent route: dense scaling-and-squaring exponential of
/// theta * rho(E) followed by the trace.
Complex trace_exp_matrix_oracle(const SpinRep& rep, Complex theta);
Complex trace_exp_matrix_oracle(double j, Complex theta);

/// Tr rho(exp(i E)) assembled as (1 +) sum_v 2 cosh(lambda_v) over the
/// positive half of the spectrum.
double trace_exp_i_cosh_form(const SpinRep& rep);

/// sum over (i, j) in {(2,3), (3,1), (1,2)} of [rho(e_i), rho(e_j)], which
/// must equal rho(E).
Matrix upsilon_commutator_sum(const SpinRep& rep);

}  // namespace ehh::liealg
