// Observables at fixed kappa: Wilson exponents, Z, the lambda diagnostic,
// and the area, volume and curvature path integrals.

#pragma once

#include "ehh/geometry.hpp"
#include "ehh/kernels.hpp"
#include "ehh/liealg.hpp"
#include "ehh/quadrature.hpp"

#include <algorithm>
#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ehh {

using Complex = std::complex<double>;

struct Scene {
  double charge = 1.0;
  geometry::Hyperlink matter;     // colored
  geometry::Hyperlink geometric;  // uncolored
  std::optional<geometry::Surface> surface;
  std::optional<geometry::Region> region;
};

enum class Observable { wilson, area, volume, curvature, diagnostics };

Observable observable_from_string(const std::string& s);
std::string to_string(Observable o);

/// Scene validation failure; `field` is a JSON-style path when known.
class SceneError : public std::invalid_argument {
 public:
  SceneError(std::string field, const std::string& msg)
      : std::invalid_argument(field.empty() ? msg : field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ValidationOptions {
  int grid = 256;
  double tol = 1e-6;
};

/// Throws SceneError when the scene is unusable for `obs`.
void validate_scene(const Scene& scene, Observable obs, const ValidationOptions& opt = {});

/// Accumulates quadrature diagnostics across the integrals of one evaluation.
struct QuadStats {
  double err_est = 0.0;  // sum of absolute error estimates, in the units of each integral
  double rel_err = 0.0;  // largest err/|I| over integrals with |I| above 1e-300
  int integrals = 0;
  bool converged = true;
  std::string traces;

  template <class V>
  void add(const quadrature::QuadResult<V>& r, const char* label) {
    err_est += r.err_est;
    const double mag = quadrature::ValueOps<V>::norm(r.value);
    if (mag > 1e-300) rel_err = std::max(rel_err, r.err_est / mag);
    ++integrals;
    converged = converged && r.converged;
    traces += std::string(label) + quadrature::format_trace(r.trace) + "\n";
  }
};

/// theta_u: the scalar multiplying F+ in the Wilson exponent of matter loop
/// u; the F- exponent is -theta_u.
Complex wilson_exponent(const Scene& scene, std::size_t u, double kappa,
                        const quadrature::QuadSpec& spec, QuadStats* stats = nullptr);

std::vector<Complex> wilson_exponents(const Scene& scene, double kappa,
                                      const quadrature::QuadSpec& spec,
                                      QuadStats* stats = nullptr);

/// The regularized lambda of geometric loop v at sbar, components j = 1..3.
std::array<Complex, 3> lambda_kappa(const Scene& scene, std::size_t v, double sbar,
                                    double kappa, const quadrature::QuadSpec& spec,
                                    QuadStats* stats = nullptr);

/// prod_u [Tr exp(theta_u F+) + Tr exp(-theta_u F-)] from given exponents.
Complex z_from_exponents(const Scene& scene, const std::vector<Complex>& theta);
Complex z_kappa(const Scene& scene, double kappa, const quadrature::QuadSpec& spec,
                QuadStats* stats = nullptr);

struct Brackets {
  Complex plus{0.0, 0.0};
  Complex minus{0.0, 0.0};
};

/// P+ and P- (real and nonnegative up to the sign of J23).
Brackets area_brackets(const Scene& scene, double kappa, const quadrature::QuadSpec& spec,
                       QuadStats* stats = nullptr);
Complex area_path_integral(const Scene& scene, double kappa, const quadrature::QuadSpec& spec,
                           QuadStats* stats = nullptr);

/// Q+ and Q- without the q^2 prefactor.
Brackets volume_brackets(const Scene& scene, double kappa, const quadrature::QuadSpec& spec,
                         QuadStats* stats = nullptr);
/// Same brackets through the generic nested (3-outer, 2-inner) route,
/// without factoring the inner double integral. Slow; for cross-checks.
Brackets volume_brackets_nested(const Scene& scene, double kappa,
                                const quadrature::QuadSpec& spec, QuadStats* stats = nullptr);
Complex volume_path_integral(const Scene& scene, double kappa, const quadrature::QuadSpec& spec,
                             QuadStats* stats = nullptr);

struct CurvatureParts {
  Complex a_plus{0.0, 0.0};
  Complex a_minus{0.0, 0.0};
  Complex b{0.0, 0.0};  // enters F+ with +, F- with -
  Complex c{0.0, 0.0};  // same on F+ and F-
  liealg::AlgebraCoeff coeff;
  Complex z{0.0, 0.0};
};

CurvatureParts curvature_parts(const Scene& scene, double kappa,
                               const quadrature::QuadSpec& spec, QuadStats* stats = nullptr);

std::pair<liealg::AlgebraCoeff, Complex> curvature_path_integral(
    const Scene& scene, double kappa, const quadrature::QuadSpec& spec,
    QuadStats* stats = nullptr);

/// Largest entry of |sum over (2,3),(3,1),(1,2) of [e_i, e_j] - E|.
double f_plus_minus_residual(const liealg::SpinRep& rep);

/// Color classes: distinct colors of the matter hyperlink, first-seen order.
std::vector<liealg::ColoredRep> color_classes(const Scene& scene);

}  // namespace ehh
