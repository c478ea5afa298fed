// Closed-form Gaussian kernel pairings.
//
// q(t) = sqrt(k)/(2 pi)^(1/4) exp(-k^2 (t-x)^2 / 4) is the 1-d mollifier,
// p its 4-fold product. Every pairing downstream factors into per-axis
// copies of two primitives: gauss1 = <q^a, q^b> and halfint =
// <q^a, d^-1 q^b>, with d^-1 f(x) = (1/2)(int_{-inf}^x - int_x^inf) f.

#pragma once

#include <array>
#include <optional>

namespace ehh::kernels {

using Vec4 = std::array<double, 4>;

struct KappaPoint {
  double kappa;
  double bk;           // kappa / (2 sqrt(4 pi))
  double kappa_tilde;  // (sqrt(pi)/2)(kappa/4)(kappa/sqrt(2 pi))^2 (kappa^2/(8 pi))^2

  explicit KappaPoint(double k);
};

/// exp(-k^2 (a-b)^2 / 8), flushed to 0 below ~1e-300.
double gauss1(double kappa, double a, double b);

/// (sqrt(2 pi)/k) erf(k (a-b) / (2 sqrt 2)).
double halfint(double kappa, double a, double b);

/// <p^x, p^y>_k: Gaussians on the two spatial axes other than k,
/// k*halfint on axis k, and <d0^-1 q^x0, q^y0> = -halfint on time.
double pairing_axis(const Vec4& x, const Vec4& y, int k, double kappa);

/// <d0^-1 p^x, p^y> = -halfint(x0, y0) * prod_i gauss1(x_i, y_i).
double dzero_pair(const Vec4& x, const Vec4& y, double kappa);

enum class Slot { first, second };

struct Inversion {
  int axis;  // 0 = time, 1..3 spatial
  Slot slot;
};

/// Product over the four axes of gauss1, with each marked axis replaced
/// by the antiderivative pairing: +halfint when d^-1 sits on the second
/// slot, -halfint on the first. No kappa factors are applied.
/// Throws std::invalid_argument if an axis is marked twice or out of range.
double mixed_pair(const Vec4& x, const Vec4& y, std::optional<Inversion> a,
                  std::optional<Inversion> b, double kappa);

}  // namespace ehh::kernels
