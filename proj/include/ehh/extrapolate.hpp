// kappa -> infinity limit estimates from a finite schedule.

#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace ehh::extrapolate {

using Complex = std::complex<double>;

enum class Mode { plateau, richardson1, richardson2 };

Mode mode_from_string(const std::string& s);
std::string to_string(Mode m);

struct KappaSchedule {
  std::vector<double> values{5.0, 10.0, 20.0, 40.0, 60.0};
  Mode mode = Mode::plateau;

  /// Throws std::invalid_argument unless >= 3 strictly increasing positive values.
  void validate() const;
};

struct LimitEstimate {
  Complex limit{0.0, 0.0};
  double err = 0.0;
  bool converged = false;
};

/// plateau: last value, err = |last - previous|.
/// richardsonP: L from the last two points under v = L + c kappa^-P, err =
/// distance to the same estimate from the pair before.
/// converged when err < tol |L|, or err < tol if |L| < 1e-9.
LimitEstimate limit_estimate(const std::vector<std::pair<double, Complex>>& samples, Mode mode,
                             double tol = 0.02);

}  // namespace ehh::extrapolate
