#include "ehh/run.hpp"

#include "ehh/scene_io.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ehh {

namespace q = quadrature;
using nlohmann::json;

SampleValue evaluate(const Scene& scene, Observable obs, double kappa, const q::QuadSpec& spec) {
  SampleValue out;
  switch (obs) {
    case Observable::wilson:
      out.value = z_kappa(scene, kappa, spec, &out.stats);
      break;
    case Observable::area:
      out.value = area_path_integral(scene, kappa, spec, &out.stats);
      break;
    case Observable::volume:
      out.value = volume_path_integral(scene, kappa, spec, &out.stats);
      break;
    case Observable::curvature: {
      const auto parts = curvature_parts(scene, kappa, spec, &out.stats);
      out.coeff = parts.coeff;
      out.z = parts.z;
      out.value = parts.coeff.cplus * parts.z;
      out.value2 = parts.coeff.cminus * parts.z;
      break;
    }
    case Observable::diagnostics:
      throw std::invalid_argument("diagnostics has no scalar value");
  }
  return out;
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

struct Row {
  double kappa, bk;
  SampleValue v;
  double wall_ms;
  Complex mc{0.0, 0.0};
};

struct LambdaRow {
  double kappa, bk;
  std::size_t v;
  double sbar, knorm, wall_ms;
  bool converged;
};

void write_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

int run_diagnostics(const RunConfig& cfg, const Scene& scene, std::ostream& log) {
  std::vector<LambdaRow> rows;
  bool quad_ok = true;
  const auto t_all = std::chrono::steady_clock::now();
  for (double kappa : cfg.schedule.values) {
    const kernels::KappaPoint kp(kappa);
    for (std::size_t v = 0; v < scene.geometric.size(); ++v) {
      for (double sb : cfg.sbars) {
        const auto t0 = std::chrono::steady_clock::now();
        QuadStats st;
        const auto lam = lambda_kappa(scene, v, sb, kappa, cfg.quad, &st);
        double n2 = 0.0;
        for (const auto& c : lam) n2 += std::norm(c);
        quad_ok = quad_ok && st.converged;
        if (!st.converged) log << "quadrature not converged (kappa=" << kappa << "):\n" << st.traces;
        rows.push_back({kappa, kp.bk, v, sb, kappa * std::sqrt(n2),
                        cfg.timing ? elapsed_ms(t0) : 0.0, st.converged});
      }
    }
  }
  // decreasing along the schedule for every (v, sbar), small at the top
  const std::size_t per_kappa = scene.geometric.size() * cfg.sbars.size();
  bool decreasing = true;
  double top_max = 0.0;
  for (std::size_t c = 0; c < per_kappa; ++c) {
    for (std::size_t k = 1; k < cfg.schedule.values.size(); ++k) {
      const double prev = rows[(k - 1) * per_kappa + c].knorm;
      const double cur = rows[k * per_kappa + c].knorm;
      if (!(cur < prev || (cur == 0.0 && prev == 0.0))) decreasing = false;
    }
    top_max = std::max(top_max, rows[(cfg.schedule.values.size() - 1) * per_kappa + c].knorm);
  }
  const bool converged = decreasing && top_max < 1e-2;
  const double total = cfg.timing ? elapsed_ms(t_all) : 0.0;

  std::ostringstream out;
  if (cfg.format == Format::csv) {
    out << "kind,kappa,bk,v,sbar,kappa_lambda_norm,wall_ms,converged\n";
    for (const auto& r : rows) {
      out << "lambda," << g17(r.kappa) << ',' << g17(r.bk) << ',' << r.v << ',' << g17(r.sbar)
          << ',' << g17(r.knorm) << ',' << g17(r.wall_ms) << ',' << (r.converged ? 1 : 0) << '\n';
    }
    out << "summary,,,,," << g17(top_max) << ',' << g17(total) << ',' << (converged ? 1 : 0)
        << '\n';
  } else {
    json j;
    j["observable"] = "diagnostics";
    j["rows"] = json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"kappa", r.kappa}, {"bk", r.bk}, {"v", r.v}, {"sbar", r.sbar},
                           {"kappa_lambda_norm", r.knorm}, {"wall_ms", r.wall_ms},
                           {"converged", r.converged}});
    }
    j["summary"] = {{"max_at_top", top_max}, {"decreasing", decreasing},
                    {"converged", converged}, {"wall_ms", total}};
    out << j.dump(2) << '\n';
  }
  write_file(cfg.output_path, out.str());
  if (cfg.output_path.empty() || cfg.output_path == "-") log << out.str();
  if (!quad_ok) return 2;
  return converged ? 0 : 2;
}

}  // namespace

int run(const RunConfig& cfg_in, const Scene& scene, std::ostream& log) {
  RunConfig cfg = cfg_in;
  cfg.quad.strict = false;
  try {
    cfg.schedule.validate();
    cfg.quad.validate();
    if (!(cfg.limit_tol > 0)) throw std::invalid_argument("limit tolerance must be positive");
    validate_scene(scene, cfg.observable);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
  if (cfg.observable == Observable::diagnostics) return run_diagnostics(cfg, scene, log);

  const bool curv = cfg.observable == Observable::curvature;
  std::vector<Row> rows;
  bool quad_ok = true;
  const auto t_all = std::chrono::steady_clock::now();
  try {
    for (double kappa : cfg.schedule.values) {
      const auto t0 = std::chrono::steady_clock::now();
      Row r{kappa, kernels::KappaPoint(kappa).bk, evaluate(scene, cfg.observable, kappa, cfg.quad),
            0.0};
      r.wall_ms = cfg.timing ? elapsed_ms(t0) : 0.0;
      if (!r.v.stats.converged) {
        quad_ok = false;
        log << "quadrature not converged (kappa=" << kappa << "):\n" << r.v.stats.traces;
      }
      if (cfg.mc_check) {
        q::QuadSpec mc = cfg.quad;
        mc.rule = q::Rule::monte_carlo;
        r.mc = evaluate(scene, cfg.observable, kappa, mc).value;
        const double rel = std::abs(r.mc - r.v.value) / std::max(std::abs(r.v.value), 1e-300);
        log << "mc-check kappa=" << kappa << " relative deviation " << rel << '\n';
      }
      rows.push_back(r);
    }
  } catch (const q::NonConvergence& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }

  std::vector<std::pair<double, Complex>> s1, s2;
  for (const auto& r : rows) {
    s1.emplace_back(r.kappa, r.v.value);
    s2.emplace_back(r.kappa, r.v.value2);
  }
  const auto lim = extrapolate::limit_estimate(s1, cfg.schedule.mode, cfg.limit_tol);
  extrapolate::LimitEstimate lim2;
  if (curv) lim2 = extrapolate::limit_estimate(s2, cfg.schedule.mode, cfg.limit_tol);
  const bool converged = lim.converged && (!curv || lim2.converged);
  const double total = cfg.timing ? elapsed_ms(t_all) : 0.0;

  std::ostringstream out;
  if (cfg.format == Format::csv) {
    out << "kind,kappa,bk,value_re,value_im,err_est,wall_ms,converged";
    if (curv) out << ",value2_re,value2_im,cplus_re,cplus_im,cminus_re,cminus_im,z_re,z_im";
    if (cfg.mc_check) out << ",mc_re,mc_im";
    out << '\n';
    for (const auto& r : rows) {
      const double err = r.v.stats.rel_err * std::abs(r.v.value);
      out << "sample," << g17(r.kappa) << ',' << g17(r.bk) << ',' << g17(r.v.value.real()) << ','
          << g17(r.v.value.imag()) << ',' << g17(err) << ',' << g17(r.wall_ms) << ','
          << (r.v.stats.converged ? 1 : 0);
      if (curv) {
        for (const Complex& c : {r.v.value2, r.v.coeff.cplus, r.v.coeff.cminus, r.v.z})
          out << ',' << g17(c.real()) << ',' << g17(c.imag());
      }
      if (cfg.mc_check) out << ',' << g17(r.mc.real()) << ',' << g17(r.mc.imag());
      out << '\n';
    }
    out << "summary,,," << g17(lim.limit.real()) << ',' << g17(lim.limit.imag()) << ','
        << g17(curv ? std::max(lim.err, lim2.err) : lim.err) << ',' << g17(total) << ','
        << (converged ? 1 : 0);
    if (curv) out << ',' << g17(lim2.limit.real()) << ',' << g17(lim2.limit.imag()) << ",,,,,,";
    if (cfg.mc_check) out << ",,";
    out << '\n';
  } else {
    json j;
    j["observable"] = to_string(cfg.observable);
    j["mode"] = extrapolate::to_string(cfg.schedule.mode);
    j["samples"] = json::array();
    for (const auto& r : rows) {
      json e = {{"kappa", r.kappa},
                {"bk", r.bk},
                {"value", {r.v.value.real(), r.v.value.imag()}},
                {"err_est", r.v.stats.rel_err * std::abs(r.v.value)},
                {"wall_ms", r.wall_ms},
                {"converged", r.v.stats.converged}};
      if (curv) {
        e["value2"] = {r.v.value2.real(), r.v.value2.imag()};
        e["cplus"] = {r.v.coeff.cplus.real(), r.v.coeff.cplus.imag()};
        e["cminus"] = {r.v.coeff.cminus.real(), r.v.coeff.cminus.imag()};
        e["z"] = {r.v.z.real(), r.v.z.imag()};
      }
      if (cfg.mc_check) e["mc"] = {r.mc.real(), r.mc.imag()};
      j["samples"].push_back(e);
    }
    j["summary"] = {{"limit", {lim.limit.real(), lim.limit.imag()}},
                    {"err", lim.err},
                    {"converged", converged},
                    {"wall_ms", total}};
    if (curv) {
      j["summary"]["limit2"] = {lim2.limit.real(), lim2.limit.imag()};
      j["summary"]["err2"] = lim2.err;
    }
    out << j.dump(2) << '\n';
  }
  try {
    write_file(cfg.output_path, out.str());
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
  if (cfg.output_path.empty() || cfg.output_path == "-") log << out.str();
  if (!quad_ok) return 2;
  return converged ? 0 : 2;
}

int run(const RunConfig& config, std::ostream& log) {
  Scene scene;
  try {
    scene = load_scene(config.scene_path);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
  return run(config, scene, log);
}

}  // namespace ehh
