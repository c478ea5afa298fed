// One kappa sweep: evaluate, extrapolate, write CSV or JSON.

#pragma once

#include "ehh/extrapolate.hpp"
#include "ehh/integrands.hpp"
#include "ehh/quadrature.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ehh {

enum class Format { csv, json };

struct RunConfig {
  std::string scene_path;
  Observable observable = Observable::wilson;
  extrapolate::KappaSchedule schedule;
  quadrature::QuadSpec quad;
  std::string output_path;
  Format format = Format::csv;
  double limit_tol = 0.02;
  bool timing = true;    // false writes wall_ms as 0
  bool mc_check = false;
  std::vector<double> sbars{0.0, 0.25, 0.5, 0.75};  // diagnostics only
};

/// Value of one observable at one kappa. For curvature, value = cplus * z
/// and value2 = cminus * z.
struct SampleValue {
  Complex value{0.0, 0.0};
  Complex value2{0.0, 0.0};
  liealg::AlgebraCoeff coeff;
  Complex z{0.0, 0.0};
  QuadStats stats;
};

SampleValue evaluate(const Scene& scene, Observable obs, double kappa,
                     const quadrature::QuadSpec& spec);

/// Exit code: 0 converged, 2 not converged or quadrature failure (rows
/// still written), 1 invalid scene or configuration. Messages go to `log`.
int run(const RunConfig& config, std::ostream& log);

/// Same, with the scene already loaded.
int run(const RunConfig& config, const Scene& scene, std::ostream& log);

}  // namespace ehh
