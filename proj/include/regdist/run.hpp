#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regdist/approx.hpp"
#include "regdist/apps.hpp"
#include "regdist/scene.hpp"

namespace regdist {

/// Command-line overrides of the scene.
struct RunOptions {
  std::string out_dir;  // empty: no files
  std::optional<int> p;
  std::optional<double> kappa;
  std::optional<int> resolution;
  std::optional<int> refine;
  std::optional<unsigned> seed;
  bool svg = false;
};

struct RunReport {
  std::string subcommand;
  CertificateReport report;
  std::optional<ConstantSchedule> schedule;
  std::map<std::string, double> fitted;
  std::optional<ConvergenceTable> convergence;
  std::vector<std::string> files;
  int exit_status = 0;  // 0 iff every verdict passes
};

inline const std::vector<std::string> kSubcommands = {"validate", "partition", "approx", "regdist",
                                                      "zeroset",  "levelset",  "lambda", "report"};

/// Scene with the options applied.
Scene apply_options(Scene s, const RunOptions& opt);

/// Runs one subcommand and writes its files to opt.out_dir. Library errors propagate.
RunReport run_subcommand(const std::string& name, const Scene& scene, const RunOptions& opt = {});

void write_schedule_csv(std::ostream& os, const ConstantSchedule& s);
void write_points_csv(std::ostream& os, const std::vector<Point>& pts);
void write_convergence_csv(std::ostream& os, const ConvergenceTable& t);
/// Points of W and of the level sets over the box, with axis ticks.
void write_svg(std::ostream& os, const Box& box, const std::vector<Point>& w, const std::vector<LevelSet>& sets);

}  // namespace regdist
