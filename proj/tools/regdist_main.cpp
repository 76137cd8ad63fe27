#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "regdist/error.hpp"
#include "regdist/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Regularized distance functions with certified derivative bounds"};
  app.require_subcommand(1);

  std::string scene_path, out_dir;
  regdist::RunOptions opt;
  int p = 0, resolution = 0, refine = -1;
  double kappa = 0.0;
  long long seed = -1;

  const std::map<std::string, std::string> about = {
      {"validate", "check the cells and the Lipschitz data of g"},
      {"partition", "build and check the partition of unity"},
      {"approx", "approximate g = g_scale*d(., W)"},
      {"regdist", "regularized distance with fitted A and B"},
      {"zeroset", "flatness of f^(p+1) along approach sequences"},
      {"levelset", "level sets of f and their Hausdorff distance to W"},
      {"lambda", "lambda(eps) diagnostic"},
      {"report", "validate, then levelset or regdist, then lambda"},
  };
  for (const auto& name : regdist::kSubcommands) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--scene", scene_path, "scene file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory for CSV/SVG files");
    sub->add_option("--p", p, "regularity order")->check(CLI::PositiveNumber);
    sub->add_option("--kappa", kappa, "approximation tolerance in (0, 1)");
    sub->add_option("--resolution", resolution, "grid nodes per axis")->check(CLI::Range(2, 100000));
    sub->add_option("--refine", refine, "grid doublings for the stability check")->check(CLI::Range(0, 4));
    sub->add_option("--seed", seed, "seed for randomized grid jitter")->check(CLI::NonNegativeNumber);
    sub->add_flag("--svg", opt.svg, "write SVG overlays (2-D scenes)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  opt.out_dir = out_dir;
  if (p > 0) opt.p = p;
  if (kappa != 0.0) opt.kappa = kappa;
  if (resolution > 0) opt.resolution = resolution;
  if (refine >= 0) opt.refine = refine;
  if (seed >= 0) opt.seed = static_cast<unsigned>(seed);

  try {
    const auto scene = regdist::load_scene(scene_path);
    const auto r = regdist::run_subcommand(name, scene, opt);
    std::cout << name << ": " << regdist::outcome_name(r.report.verdict()) << " (" << r.report.checks() << " checks, "
              << r.report.failures() << " failed, " << r.report.ambiguous() << " ambiguous)\n";
    for (const auto& [k, v] : r.fitted)
      if (k.find('/') == std::string::npos) std::cout << "  " << k << " = " << regdist::fmt17(v) << "\n";
    for (const auto& f : r.files) std::cout << "  wrote " << f << "\n";
    if (r.convergence)
      for (const auto& w : r.convergence->warnings) std::cerr << "warning: " << w << "\n";
    return r.exit_status;
  } catch (const regdist::Error& e) {
    std::cerr << "regdist " << name << ": " << e.what() << "\n";
    return regdist::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "regdist " << name << ": " << e.what() << "\n";
    return 10;
  }
}
