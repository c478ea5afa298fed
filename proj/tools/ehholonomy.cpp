// ehholonomy: kappa sweeps of holonomy observables over a JSON scene.

#include "ehh/run.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized holonomy path integrals along a kappa schedule"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "evaluate an observable over a kappa schedule");

  ehh::RunConfig cfg;
  std::string observable = "wilson", kappas = "5,10,20,40,60", format = "csv",
              mode = "plateau", rule = "gauss-legendre", sbars = "0,0.25,0.5,0.75";
  int panels = 0;
  bool no_timing = false;

  run->add_option("--scene", cfg.scene_path, "scene JSON file")->required();
  run->add_option("--observable", observable, "wilson|area|volume|curvature|diagnostics")
      ->check(CLI::IsMember({"wilson", "area", "volume", "curvature", "diagnostics"}));
  run->add_option("--kappa", kappas, "comma-separated increasing kappa values");
  run->add_option("--rel-tol", cfg.quad.rel_tol, "quadrature relative tolerance");
  run->add_option("--out", cfg.output_path, "output file")->required();
  run->add_option("--threads", cfg.quad.threads, "worker threads")->check(CLI::PositiveNumber);
  run->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--quad-panels", panels, "base panels per axis (default 2)");
  run->add_option("--nodes", cfg.quad.nodes_per_panel, "Gauss-Legendre nodes per panel");
  run->add_option("--kappa-scaling", cfg.quad.kappa_scaling, "extra panels per unit kappa");
  run->add_option("--max-refinements", cfg.quad.max_refinements, "panel doublings");
  run->add_option("--rule", rule, "gauss-legendre|monte-carlo")
      ->check(CLI::IsMember({"gauss-legendre", "monte-carlo"}));
  run->add_flag("--mc-check", cfg.mc_check, "also evaluate with the Monte-Carlo rule");
  run->add_option("--mc-samples", cfg.quad.mc_samples, "Monte-Carlo samples");
  run->add_option("--mc-seed", cfg.quad.mc_seed, "Monte-Carlo seed");
  run->add_option("--extrapolation", mode, "plateau|richardson-1|richardson-2")
      ->check(CLI::IsMember({"plateau", "richardson-1", "richardson-2"}));
  run->add_option("--limit-tol", cfg.limit_tol, "relative tolerance of the limit estimate");
  run->add_option("--sbar", sbars, "diagnostics sample points on each geometric loop");
  run->add_flag("--no-timing", no_timing, "write wall_ms as 0");

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.observable = ehh::observable_from_string(observable);
    cfg.schedule.values = parse_list(kappas);
    cfg.schedule.mode = ehh::extrapolate::mode_from_string(mode);
    cfg.sbars = parse_list(sbars);
    if (panels > 0) cfg.quad.base_panels = panels;
    cfg.quad.rule = rule == "monte-carlo" ? ehh::quadrature::Rule::monte_carlo
                                          : ehh::quadrature::Rule::gauss_legendre;
    cfg.format = format == "json" ? ehh::Format::json : ehh::Format::csv;
    cfg.timing = !no_timing;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return ehh::run(cfg, std::cerr);
}
