#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regdist/cells.hpp"

namespace regdist {

/// One W primitive as declared: kind plus its numbers (and a file for clouds).
///   point x…            segment a… b…         polyline p0… p1… …
///   circle cx cy r      half_line o… dir…      line o… dir…
///   poly_graph a b c0 c1 …  (y = Σ c_k x^k over [a, b])
///   point_cloud r  with file = path of a CSV point list
struct WPrimitive {
  std::string kind;
  std::vector<double> values;
  std::string file;
  friend bool operator==(const WPrimitive&, const WPrimitive&) = default;
};

/// A stratum as declared.
///   interval: bounds = a, b (n = 1)
///   point:    at = x (a 0-dimensional graph cell, n = 1)
///   open:     base = a, b; lower / upper = coefficients or ∓inf
///   graph:    base = a, b; phi = coefficients
///   region:   positive = coefficients (repeatable), n = 2
struct StratumDecl {
  std::string id;
  std::string kind;
  std::vector<double> bounds;  // interval bounds or open/graph base interval
  std::optional<std::vector<double>> lower, upper;  // empty optional = infinite
  std::vector<double> phi;
  double at = 0.0;
  std::vector<std::vector<double>> positive;
  double M = 0.0;
  std::vector<int> perm;
  friend bool operator==(const StratumDecl&, const StratumDecl&) = default;
};

struct Scene {
  int n = 0;
  std::vector<WPrimitive> W;
  std::vector<StratumDecl> strata;
  int p = 2;
  double kappa = 0.1;
  std::optional<double> eta;
  double g_scale = 1.0;  // g = g_scale·d(·, W) for the approx subcommand
  std::vector<double> t_list;
  std::vector<double> eps_list;
  std::string bump_target;
  unsigned seed = 1;
  GridSpec grid;
  std::string base_dir;  // resolves point-cloud files; not part of the dump

  friend bool operator==(const Scene& a, const Scene& b) {
    return a.n == b.n && a.W == b.W && a.strata == b.strata && a.p == b.p && a.kappa == b.kappa && a.eta == b.eta &&
           a.g_scale == b.g_scale && a.t_list == b.t_list && a.eps_list == b.eps_list &&
           a.bump_target == b.bump_target && a.seed == b.seed && a.grid == b.grid;
  }
};

/// Sectioned key-value text: [params], [grid], [w], [stratum <id>].
/// Throws SyntaxError (with line and column) or SemanticError.
Scene parse_scene(const std::string& text, const std::string& base_dir = ".");
Scene load_scene(const std::string& path);
/// Normalized text; parse_scene(dump_scene(s)) == s.
std::string dump_scene(const Scene& s);

OraclePtr build_w(const Scene& s);
Stratification build_stratification(const Scene& s);

}  // namespace regdist
