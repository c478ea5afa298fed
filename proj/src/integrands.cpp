#include "ehh/integrands.hpp"

#include <cmath>
#include <numbers>

namespace ehh {

namespace q = quadrature;
using geometry::FourierLoop;
using geometry::LoopSample;
using geometry::Vec4;
using kernels::Inversion;
using kernels::Slot;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};
// Gaussian exponents above this are skipped inside inner sums (e^-60 ~ 1e-26)
constexpr double kSkip = 60.0;

// (i, j, k) in {(1,2,3), (2,3,1), (3,1,2)}
constexpr std::array<std::array<int, 3>, 3> kCyclic{{{1, 2, 3}, {2, 3, 1}, {3, 1, 2}}};

Vec4 cross_spatial(const Vec4& a, const Vec4& b) {
  return {0.0, a[2] * b[3] - a[3] * b[2], a[3] * b[1] - a[1] * b[3], a[1] * b[2] - a[2] * b[1]};
}

/// Loop samples at the nodes of an inner rule.
std::vector<LoopSample> tabulate(const FourierLoop& loop, const q::Rule1D& r) {
  std::vector<LoopSample> out;
  out.reserve(r.x.size());
  for (double s : r.x) out.push_back(loop.eval(s));
  return out;
}

std::vector<std::vector<LoopSample>> tabulate_all(const std::vector<FourierLoop>& loops,
                                                  const q::Rule1D& r) {
  std::vector<std::vector<LoopSample>> out;
  out.reserve(loops.size());
  for (const auto& l : loops) out.push_back(tabulate(l, r));
  return out;
}

template <std::size_t D>
struct CellMap {
  std::array<double, D> lo, len;
  double volume;

  explicit CellMap(const geometry::Box<D>& b) : volume(b.volume()) {
    for (std::size_t i = 0; i < D; ++i) {
      lo[i] = b.lo[i];
      len[i] = b.hi[i] - b.lo[i];
    }
  }
  std::array<double, D> operator()(const std::array<double, D>& x) const {
    std::array<double, D> y;
    for (std::size_t i = 0; i < D; ++i) y[i] = lo[i] + len[i] * x[i];
    return y;
  }
};

void require_surface(const Scene& s) {
  if (!s.surface) throw SceneError("surface", "this observable needs a surface");
}

void require_region(const Scene& s) {
  if (!s.region) throw SceneError("region", "this observable needs a region");
}

Complex principal_root(Complex z, std::size_t n) {
  if (n == 1 || z == Complex{0.0, 0.0}) return z;
  return std::pow(z, 1.0 / static_cast<double>(n));
}

}  // namespace

Observable observable_from_string(const std::string& s) {
  if (s == "wilson") return Observable::wilson;
  if (s == "area") return Observable::area;
  if (s == "volume") return Observable::volume;
  if (s == "curvature") return Observable::curvature;
  if (s == "diagnostics") return Observable::diagnostics;
  throw std::invalid_argument("unknown observable '" + s + "'");
}

std::string to_string(Observable o) {
  switch (o) {
    case Observable::wilson: return "wilson";
    case Observable::area: return "area";
    case Observable::volume: return "volume";
    case Observable::curvature: return "curvature";
    case Observable::diagnostics: return "diagnostics";
  }
  return "?";
}

std::vector<liealg::ColoredRep> color_classes(const Scene& scene) {
  std::vector<liealg::ColoredRep> out;
  for (const auto& c : scene.matter.colors) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

void validate_scene(const Scene& scene, Observable obs, const ValidationOptions& opt) {
  if (!std::isfinite(scene.charge)) throw SceneError("charge", "must be finite");
  if (scene.matter.colors.size() != scene.matter.loops.size()) {
    throw SceneError("matter", "every matter loop needs a color");
  }
  for (std::size_t u = 0; u < scene.matter.colors.size(); ++u) {
    const auto& c = scene.matter.colors[u];
    if (c.jplus2 < 0 || c.jplus2 > liealg::kMaxTwoJ || c.jminus2 < 0 ||
        c.jminus2 > liealg::kMaxTwoJ) {
      throw SceneError("matter[" + std::to_string(u) + "].color", "doubled spins must be in 0..50");
    }
  }
  if (scene.geometric.colored()) throw SceneError("geometric", "geometric loops carry no color");

  std::vector<FourierLoop> all = scene.matter.loops;
  all.insert(all.end(), scene.geometric.loops.begin(), scene.geometric.loops.end());
  const auto name = [&](std::size_t idx) {
    return idx < scene.matter.size()
               ? "matter[" + std::to_string(idx) + "]"
               : "geometric[" + std::to_string(idx - scene.matter.size()) + "]";
  };
  const auto viol = geometry::validate_timelike(all, opt.grid, opt.tol);
  if (!viol.empty()) {
    const auto& v = viol.front();
    const char* what = v.kind == geometry::TimelikeViolation::Kind::spatial_coincidence
                           ? "spatial coincidence"
                           : "two spatial coordinates and time coincide";
    throw SceneError(name(v.loop_a),
                     std::string("not time-like: ") + what + " with " + name(v.loop_b) +
                         " at s=" + std::to_string(v.s_a) + ", " + std::to_string(v.s_b) + " (" +
                         std::to_string(viol.size()) + " violations)");
  }

  if (obs == Observable::area || obs == Observable::curvature) require_surface(scene);
  if (obs == Observable::volume) require_region(scene);

  if (obs == Observable::area) {
    if (!scene.surface->parallel_to_x2x3()) {
      throw SceneError("surface.affine",
                       "area surfaces must be planar and lie in a translate of the x2-x3 plane");
    }
    const auto classes = color_classes(scene);
    const auto& part = scene.surface->partition();
    for (std::size_t c = 0; c < part.size(); ++c) {
      if (part[c].label &&
          std::find(classes.begin(), classes.end(), *part[c].label) == classes.end()) {
        throw SceneError("surface.partition[" + std::to_string(c) + "].label",
                         "no matter loop carries this color");
      }
    }
    for (std::size_t u = 0; u < scene.matter.size(); ++u) {
      if (geometry::min_distance(scene.matter.loops[u], *scene.surface, opt.grid) <= opt.tol) {
        throw SceneError("matter[" + std::to_string(u) + "]", "meets the surface");
      }
    }
  }
  if (obs == Observable::volume) {
    for (std::size_t u = 0; u < scene.matter.size(); ++u) {
      if (geometry::min_distance(scene.matter.loops[u], *scene.region, opt.grid) <= opt.tol) {
        throw SceneError("matter[" + std::to_string(u) + "]", "meets the region");
      }
    }
  }
  if (obs == Observable::curvature) {
    for (std::size_t v = 0; v < scene.geometric.size(); ++v) {
      if (geometry::min_distance(scene.geometric.loops[v], *scene.surface, opt.grid) <= opt.tol) {
        throw SceneError("geometric[" + std::to_string(v) + "]", "meets the surface");
      }
    }
  }
}

// ------------------------------------------------------------------ wilson

Complex wilson_exponent(const Scene& scene, std::size_t u, double kappa, const q::QuadSpec& spec,
                        QuadStats* stats) {
  if (u >= scene.matter.size()) throw std::out_of_range("matter loop index");
  if (scene.charge == 0.0 || scene.geometric.empty()) return {0.0, 0.0};
  const FourierLoop& y = scene.matter.loops[u];
  double total = 0.0;
  for (const auto& rho : scene.geometric.loops) {
    auto f = [&](const std::array<double, 2>& x) -> Complex {
      const LoopSample a = y.eval(x[0]);
      const LoopSample b = rho.eval(x[1]);
      const Vec4 c = cross_spatial(a.velocity, b.velocity);
      double sum = 0.0;
      for (int k = 1; k <= 3; ++k) sum += kernels::pairing_axis(a.point, b.point, k, kappa) * c[k];
      return {sum, 0.0};
    };
    const auto r = q::integrate<2>(f, spec, kappa);
    if (stats) stats->add(r, "wilson ");
    total += r.value.real();
  }
  // charge applied last so theta is exactly linear in it
  const double pref = kappa * kappa * kappa / (16.0 * kPi);
  return scene.charge * (-kI * pref * total);
}

std::vector<Complex> wilson_exponents(const Scene& scene, double kappa, const q::QuadSpec& spec,
                                      QuadStats* stats) {
  std::vector<Complex> out;
  out.reserve(scene.matter.size());
  for (std::size_t u = 0; u < scene.matter.size(); ++u)
    out.push_back(wilson_exponent(scene, u, kappa, spec, stats));
  return out;
}

std::array<Complex, 3> lambda_kappa(const Scene& scene, std::size_t v, double sbar, double kappa,
                                    const q::QuadSpec& spec, QuadStats* stats) {
  if (v >= scene.geometric.size()) throw std::out_of_range("geometric loop index");
  std::array<Complex, 3> out{};
  if (scene.charge == 0.0) return out;
  const Vec4 target = scene.geometric.loops[v].eval(sbar).point;
  for (const auto& y : scene.matter.loops) {
    auto f = [&](const std::array<double, 1>& x) -> std::array<Complex, 3> {
      const LoopSample a = y.eval(x[0]);
      const double d = kernels::dzero_pair(a.point, target, kappa);
      return {Complex{d * a.velocity[1]}, Complex{d * a.velocity[2]}, Complex{d * a.velocity[3]}};
    };
    const auto r = q::integrate<1>(f, spec, kappa);
    if (stats) stats->add(r, "lambda ");
    for (int j = 0; j < 3; ++j) out[j] += r.value[j];
  }
  const Complex pref = -kI * kappa * kappa / (2.0 * std::sqrt(4.0 * kPi));
  for (auto& c : out) c = scene.charge * (pref * c);
  return out;
}

Complex z_from_exponents(const Scene& scene, const std::vector<Complex>& theta) {
  Complex z{1.0, 0.0};
  for (std::size_t u = 0; u < scene.matter.size(); ++u) {
    const auto& c = scene.matter.colors[u];
    z *= liealg::trace_exp(liealg::cached_rep(c.jplus2), theta[u]) +
         liealg::trace_exp(liealg::cached_rep(c.jminus2), -theta[u]);
  }
  return z;
}

Complex z_kappa(const Scene& scene, double kappa, const q::QuadSpec& spec, QuadStats* stats) {
  return z_from_exponents(scene, wilson_exponents(scene, kappa, spec, stats));
}

// ------------------------------------------------------------------ area

Brackets area_brackets(const Scene& scene, double kappa, const q::QuadSpec& spec,
                       QuadStats* stats) {
  require_surface(scene);
  const auto& surf = *scene.surface;
  const kernels::KappaPoint kp(kappa);
  const double bk3 = kp.bk * kp.bk * kp.bk;
  Brackets out;
  if (scene.charge == 0.0) return out;

  for (const auto& cell : surf.partition()) {
    if (!cell.label) continue;
    std::vector<const FourierLoop*> gamma;
    for (std::size_t u = 0; u < scene.matter.size(); ++u)
      if (scene.matter.colors[u] == *cell.label) gamma.push_back(&scene.matter.loops[u]);
    if (gamma.empty()) continue;

    const CellMap<2> map(cell.box);
    auto make = [&](const q::Rule1D& r) {
      std::vector<std::vector<LoopSample>> tab;
      for (const auto* l : gamma) tab.push_back(tabulate(*l, r));
      return [&, r, tab = std::move(tab)](const std::array<double, 2>& x) -> Complex {
        const auto t = map(x);
        const Vec4 sig = surf.point(t[0], t[1]);
        const double c8 = kappa * kappa / 8.0;
        double inner = 0.0;
        for (const auto& samples : tab) {
          for (std::size_t k = 0; k < samples.size(); ++k) {
            const auto& p = samples[k].point;
            const double d2 = (p[1] - sig[1]) * (p[1] - sig[1]) + (p[2] - sig[2]) * (p[2] - sig[2]) +
                              (p[3] - sig[3]) * (p[3] - sig[3]);
            if (c8 * d2 > kSkip) continue;
            inner += r.w[k] * samples[k].velocity[1] * kernels::dzero_pair(p, sig, kappa);
          }
        }
        const double j23 = surf.jacobians(t[0], t[1]).J[2][3];
        return {std::abs(scene.charge * kappa * inner) * j23 * map.volume, 0.0};
      };
    };
    const auto res = q::integrate_outer_inner<2>(make, spec, kappa);
    if (stats) stats->add(res, "area ");
    const double a = bk3 * res.value.real();
    out.plus += a * std::sqrt(cell.label->xi_plus());
    out.minus += a * std::sqrt(cell.label->xi_minus());
  }
  return out;
}

Complex area_path_integral(const Scene& scene, double kappa, const q::QuadSpec& spec,
                           QuadStats* stats) {
  const Brackets p = area_brackets(scene, kappa, spec, stats);
  const auto theta = wilson_exponents(scene, kappa, spec, stats);
  const std::size_t n = scene.matter.size();
  Complex result{1.0, 0.0};
  if (n == 0) return {0.0, 0.0};
  const Complex rp = principal_root(p.plus, n);
  const Complex rm = principal_root(kI * p.minus, n);
  for (std::size_t u = 0; u < n; ++u) {
    const auto& c = scene.matter.colors[u];
    result *= rp * liealg::trace_exp(liealg::cached_rep(c.jplus2), theta[u]) +
              rm * liealg::trace_exp(liealg::cached_rep(c.jminus2), -theta[u]);
  }
  return result;
}

// ------------------------------------------------------------------ volume

namespace {

// sum_k sum_ij eps^{ijk} a[k][i] b[j]
double volume_inner(const std::array<std::array<double, 4>, 4>& a, const std::array<double, 4>& b) {
  return (a[1][2] * b[3] - a[1][3] * b[2]) + (a[2][3] * b[1] - a[2][1] * b[3]) +
         (a[3][1] * b[2] - a[3][2] * b[1]);
}

Brackets volume_assemble(const Scene& scene, const std::vector<double>& per_loop,
                         double kappa) {
  const kernels::KappaPoint kp(kappa);
  Brackets out;
  for (std::size_t u = 0; u < scene.matter.size(); ++u) {
    out.plus += kp.kappa_tilde * scene.matter.colors[u].xi_plus() * per_loop[u];
    out.minus += kp.kappa_tilde * scene.matter.colors[u].xi_minus() * per_loop[u];
  }
  return out;
}

}  // namespace

Brackets volume_brackets(const Scene& scene, double kappa, const q::QuadSpec& spec,
                         QuadStats* stats) {
  require_region(scene);
  const auto& region = *scene.region;
  std::vector<double> per_loop(scene.matter.size(), 0.0);
  for (std::size_t u = 0; u < scene.matter.size(); ++u) {
    const FourierLoop& y = scene.matter.loops[u];
    for (const auto& box : region.partition()) {
      const CellMap<3> map(box);
      auto make = [&](const q::Rule1D& r) {
        // the region sits at time 0, so the time factor depends on s only
        std::vector<double> tf;
        auto tab = tabulate(y, r);
        for (const auto& smp : tab) tf.push_back(-kernels::halfint(kappa, smp.point[0], 0.0));
        return [&, r, tab = std::move(tab), tf = std::move(tf)](
                   const std::array<double, 3>& x) -> Complex {
          const Vec4 rho = region.point(map(x));
          const double c8 = kappa * kappa / 8.0;
          std::array<std::array<double, 4>, 4> a{};
          std::array<double, 4> b{};
          // per-axis factorization of pairing_axis and dzero_pair; b carries the
          // full spatial Gaussian, and where it vanishes so does the product
          bool near = false;
          for (std::size_t n = 0; n < tab.size(); ++n) {
            const auto& smp = tab[n];
            std::array<double, 4> sq{};
            for (int i = 1; i <= 3; ++i) sq[i] = (smp.point[i] - rho[i]) * (smp.point[i] - rho[i]);
            const double d2 = sq[1] + sq[2] + sq[3];
            if (c8 * (d2 - std::max({sq[1], sq[2], sq[3]})) > kSkip) continue;
            std::array<double, 4> g{};
            for (int i = 1; i <= 3; ++i) g[i] = kernels::gauss1(kappa, smp.point[i], rho[i]);
            const double wt = r.w[n] * tf[n];
            if (c8 * d2 <= kSkip) {
              near = true;
              const double d = wt * g[1] * g[2] * g[3];
              for (int j = 1; j <= 3; ++j) b[j] += d * smp.velocity[j];
            }
            for (int k = 1; k <= 3; ++k) {
              if (c8 * (d2 - sq[k]) > kSkip) continue;
              const double g2 = k == 1 ? g[2] * g[3] : k == 2 ? g[1] * g[3] : g[1] * g[2];
              const double pk = wt * g2 * kappa * kernels::halfint(kappa, smp.point[k], rho[k]);
              for (int i = 1; i <= 3; ++i) a[k][i] += pk * smp.velocity[i];
            }
          }
          if (!near) return {0.0, 0.0};
          return {region.abs_jacobian() * std::abs(volume_inner(a, b)) * map.volume, 0.0};
        };
      };
      const auto res = q::integrate_outer_inner<3>(make, spec, kappa);
      if (stats) stats->add(res, "volume ");
      per_loop[u] += res.value.real();
    }
  }
  return volume_assemble(scene, per_loop, kappa);
}

Brackets volume_brackets_nested(const Scene& scene, double kappa, const q::QuadSpec& spec,
                                QuadStats* stats) {
  require_region(scene);
  const auto& region = *scene.region;
  std::vector<double> per_loop(scene.matter.size(), 0.0);
  for (std::size_t u = 0; u < scene.matter.size(); ++u) {
    const FourierLoop& y = scene.matter.loops[u];
    for (const auto& box : region.partition()) {
      const CellMap<3> map(box);
      auto f = [&](const std::array<double, 3>& xo, const std::array<double, 2>& xi) -> Complex {
        const Vec4 rho = region.point(map(xo));
        const LoopSample a = y.eval(xi[0]);
        const LoopSample b = y.eval(xi[1]);
        const Vec4 c = cross_spatial(a.velocity, b.velocity);
        double sum = 0.0;
        for (int k = 1; k <= 3; ++k) sum += kernels::pairing_axis(a.point, rho, k, kappa) * c[k];
        return {sum * kernels::dzero_pair(b.point, rho, kappa), 0.0};
      };
      auto combine = [&](const std::array<double, 3>&, const Complex& inner) -> Complex {
        return {region.abs_jacobian() * std::abs(inner) * map.volume, 0.0};
      };
      const auto res = q::integrate_nested<3, 2>(f, combine, spec, kappa);
      if (stats) stats->add(res, "volume-nested ");
      per_loop[u] += res.value.real();
    }
  }
  return volume_assemble(scene, per_loop, kappa);
}

Complex volume_path_integral(const Scene& scene, double kappa, const q::QuadSpec& spec,
                             QuadStats* stats) {
  if (scene.charge == 0.0) return {0.0, 0.0};
  const Brackets b = volume_brackets(scene, kappa, spec, stats);
  const auto theta = wilson_exponents(scene, kappa, spec, stats);
  const std::size_t n = scene.matter.size();
  if (n == 0) return {0.0, 0.0};
  const Complex rp = principal_root(b.plus, n);
  const Complex rm = principal_root(b.minus, n);
  Complex result{1.0, 0.0};
  for (std::size_t u = 0; u < n; ++u) {
    const auto& c = scene.matter.colors[u];
    result *= rp * liealg::trace_exp(liealg::cached_rep(c.jplus2), theta[u]) +
              rm * liealg::trace_exp(liealg::cached_rep(c.jminus2), -theta[u]);
  }
  return scene.charge * scene.charge * result;
}

// ------------------------------------------------------------------ curvature

CurvatureParts curvature_parts(const Scene& scene, double kappa, const q::QuadSpec& spec,
                               QuadStats* stats) {
  require_surface(scene);
  const auto& surf = *scene.surface;
  CurvatureParts out;
  out.z = z_kappa(scene, kappa, spec, stats);
  if (scene.geometric.empty()) return out;
  const auto& loops = scene.geometric.loops;

  // A: plain p^sigma against spatially inverted p^rho
  auto make_a = [&](const q::Rule1D& r) {
    return [&, r, tab = tabulate_all(loops, r)](const std::array<double, 2>& t) -> Complex {
      const Vec4 sig = surf.point(t[0], t[1]);
      const auto jac = surf.jacobians(t[0], t[1]);
      double sum = 0.0;
      for (const auto& samples : tab) {
        for (std::size_t n = 0; n < samples.size(); ++n) {
          const auto& p = samples[n];
          double acc = 0.0;
          for (const auto& [i, j, k] : kCyclic) {
            const double mj = kernels::mixed_pair(sig, p.point, Inversion{j, Slot::second},
                                                  std::nullopt, kappa);
            const double mk = kernels::mixed_pair(sig, p.point, Inversion{k, Slot::second},
                                                  std::nullopt, kappa);
            acc += kappa * (p.velocity[k] * mj - p.velocity[j] * mk) * jac.J[0][i];
          }
          sum += r.w[n] * acc;
        }
      }
      return {sum, 0.0};
    };
  };
  const auto ra = q::integrate_outer_inner<2>(make_a, spec, kappa);
  if (stats) stats->add(ra, "curv-A ");
  const double a_pref = kappa * kappa * kappa / (32.0 * kPi * std::sqrt(4.0 * kPi));
  out.a_plus = -kI * a_pref * ra.value.real();
  out.a_minus = kI * a_pref * ra.value.real();

  auto make_b = [&](const q::Rule1D& r) {
    return [&, r, tab = tabulate_all(loops, r)](const std::array<double, 2>& t) -> Complex {
      const Vec4 sig = surf.point(t[0], t[1]);
      const auto js = surf.jacobians(t[0], t[1]).j_sigma();
      double sum = 0.0;
      for (const auto& samples : tab) {
        for (std::size_t n = 0; n < samples.size(); ++n) {
          const auto& p = samples[n];
          const double d = kernels::dzero_pair(sig, p.point, kappa);
          if (d == 0.0) continue;
          const double dot =
              p.velocity[1] * js[0] + p.velocity[2] * js[1] + p.velocity[3] * js[2];
          sum += r.w[n] * d * dot;
        }
      }
      return {sum, 0.0};
    };
  };
  const auto rb = q::integrate_outer_inner<2>(make_b, spec, kappa);
  if (stats) stats->add(rb, "curv-B ");
  const double b_pref = std::pow(kappa, 4) / (32.0 * kPi * std::sqrt(4.0 * kPi));
  out.b = kI * b_pref * rb.value.real();

  // C: the s and sbar integrals factor at each surface point
  auto make_c = [&](const q::Rule1D& r) {
    return [&, r, tab = tabulate_all(loops, r)](const std::array<double, 2>& t) -> Complex {
      const Vec4 sig = surf.point(t[0], t[1]);
      const auto jac = surf.jacobians(t[0], t[1]);
      // mom[a][b] = sum_v int ds rho'_b <d0^-1 p^sig, d_a^-1 p^rho>
      std::array<std::array<double, 4>, 4> mom{};
      for (const auto& samples : tab) {
        for (std::size_t n = 0; n < samples.size(); ++n) {
          const auto& p = samples[n];
          for (int a = 1; a <= 3; ++a) {
            const double m = kernels::mixed_pair(sig, p.point, Inversion{0, Slot::first},
                                                 Inversion{a, Slot::second}, kappa);
            if (m == 0.0) continue;
            for (int b = 1; b <= 3; ++b) mom[a][b] += r.w[n] * m * p.velocity[b];
          }
        }
      }
      double sum = 0.0;
      for (const auto& [i, j, k] : kCyclic) {
        const double x = kappa * (mom[j][k] - mom[k][j]);
        const double y = kappa * (mom[k][i] - mom[i][k]);
        sum += x * y * jac.J[i][j];
      }
      return {sum, 0.0};
    };
  };
  const auto rc = q::integrate_outer_inner<2>(make_c, spec, kappa);
  if (stats) stats->add(rc, "curv-C ");
  out.c = -std::pow(kappa, 4) / (32.0 * kPi * kPi) * rc.value.real();

  out.coeff.cplus = out.a_plus + out.c + out.b;
  out.coeff.cminus = out.a_minus + out.c - out.b;
  return out;
}

std::pair<liealg::AlgebraCoeff, Complex> curvature_path_integral(const Scene& scene,
                                                                 double kappa,
                                                                 const q::QuadSpec& spec,
                                                                 QuadStats* stats) {
  const auto parts = curvature_parts(scene, kappa, spec, stats);
  return {parts.coeff, parts.z};
}

double f_plus_minus_residual(const liealg::SpinRep& rep) {
  const liealg::Matrix diff = liealg::upsilon_commutator_sum(rep) - rep.element_E();
  return diff.cwiseAbs().maxCoeff();
}

}  // namespace ehh
