#include "ehh/extrapolate.hpp"

#include <cmath>
#include <stdexcept>

namespace ehh::extrapolate {

Mode mode_from_string(const std::string& s) {
  if (s == "plateau") return Mode::plateau;
  if (s == "richardson-1" || s == "richardson1") return Mode::richardson1;
  if (s == "richardson-2" || s == "richardson2") return Mode::richardson2;
  throw std::invalid_argument("unknown extrapolation mode '" + s + "'");
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::plateau: return "plateau";
    case Mode::richardson1: return "richardson-1";
    case Mode::richardson2: return "richardson-2";
  }
  return "?";
}

void KappaSchedule::validate() const {
  if (values.size() < 3) throw std::invalid_argument("kappa schedule needs at least 3 values");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw std::invalid_argument("kappa values must be positive");
    if (i > 0 && !(values[i] > values[i - 1]))
      throw std::invalid_argument("kappa values must be strictly increasing");
  }
}

namespace {

Complex richardson(double ka, Complex va, double kb, Complex vb, int p) {
  const double wa = std::pow(ka, p), wb = std::pow(kb, p);
  return (wb * vb - wa * va) / (wb - wa);
}

}  // namespace

LimitEstimate limit_estimate(const std::vector<std::pair<double, Complex>>& samples, Mode mode,
                             double tol) {
  if (samples.size() < 3) throw std::invalid_argument("limit estimate needs at least 3 samples");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].first > samples[i - 1].first))
      throw std::invalid_argument("samples must have increasing kappa");
  }
  const std::size_t n = samples.size();
  const auto& [k1, v1] = samples[n - 3];
  const auto& [k2, v2] = samples[n - 2];
  const auto& [k3, v3] = samples[n - 1];

  LimitEstimate out;
  switch (mode) {
    case Mode::plateau:
      out.limit = v3;
      out.err = std::abs(v3 - v2);
      break;
    case Mode::richardson1:
    case Mode::richardson2: {
      const int p = mode == Mode::richardson1 ? 1 : 2;
      out.limit = richardson(k2, v2, k3, v3, p);
      out.err = std::abs(out.limit - richardson(k1, v1, k2, v2, p));
      break;
    }
  }
  const double scale = std::abs(out.limit);
  out.converged = scale < 1e-9 ? out.err < tol : out.err < tol * scale;
  return out;
}

}  // namespace ehh::extrapolate
