#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "regdist/error.hpp"
#include "regdist/run.hpp"
#include "regdist/scene.hpp"

using namespace regdist;
namespace fs = std::filesystem;

namespace {

const char* kTwoRay = R"(# two rays
[params]
dim = 1
p = 2
kappa = 0.1

[grid]
lo = -3
hi = 3
resolution = 121

[w]
point = 0

[stratum negative]
kind = interval
bounds = -inf, 0

[stratum positive]
kind = interval
bounds = 0, inf
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

ErrorCode code_of(const std::string& text) {
  try {
    parse_scene(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("parsed");
  return ErrorCode::invalid_argument;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse a minimal scene") {
  Scene s = parse_scene(kTwoRay);
  CHECK(s.n == 1);
  CHECK(s.p == 2);
  CHECK(s.kappa == 0.1);
  REQUIRE(s.W.size() == 1);
  CHECK(s.W[0].kind == "point");
  REQUIRE(s.strata.size() == 2);
  CHECK(s.strata[0].id == "negative");
  CHECK(s.grid.resolution == 121);

  auto strat = build_stratification(s);
  CHECK(strat.strata.size() == 2);
  CHECK(strat.W->distance(Point{-0.4}) == doctest::Approx(0.4));
}

TEST_CASE("semantic errors") {
  CHECK(code_of(replace(kTwoRay, "kappa = 0.1", "kappa = 1.5")) == ErrorCode::semantic_error);
  CHECK(code_of(replace(kTwoRay, "[stratum positive]", "[stratum negative]")) == ErrorCode::semantic_error);
  CHECK(code_of(replace(kTwoRay, "p = 2", "p = 2\ncolour = 3")) == ErrorCode::semantic_error);
  CHECK(code_of(replace(kTwoRay, "p = 2", "p = 2\nbump_target = nowhere")) == ErrorCode::semantic_error);
}

TEST_CASE("syntax errors carry a position") {
  const std::string bad = replace(kTwoRay, "hi = 3", "hi = 3x");
  try {
    parse_scene(bad);
    FAIL("parsed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::syntax_error);
    CHECK(std::string(e.what()).find("line 9, column 6") != std::string::npos);
  }
  CHECK(code_of(replace(kTwoRay, "[grid]", "[grid")) == ErrorCode::syntax_error);
}

TEST_CASE("half-line scene") {
  Scene s = load_scene(fs::path(REGDIST_SCENE_DIR) / "half_line.scene");
  auto strat = build_stratification(s);
  auto dims = strat.dims();
  REQUIRE(dims.size() == 3);
  CHECK(std::count(dims.begin(), dims.end(), 1) == 1);
  CHECK(std::count(dims.begin(), dims.end(), 2) == 2);
  CHECK(s.bump_target == "axis");
}

TEST_CASE("dump round trip") {
  for (const char* name : {"two_ray.scene", "half_line.scene", "unit_circle.scene", "gap.scene"}) {
    Scene s = load_scene(fs::path(REGDIST_SCENE_DIR) / name);
    Scene t = parse_scene(dump_scene(s), s.base_dir);
    CHECK(s == t);
    CHECK(dump_scene(t) == dump_scene(s));
  }
}

TEST_CASE("subcommand exit status and deterministic output") {
  Scene s = parse_scene(kTwoRay);
  const fs::path root = fs::temp_directory_path() / "regdist_scene_test";
  fs::remove_all(root);
  RunOptions a, b;
  a.out_dir = (root / "a").string();
  b.out_dir = (root / "b").string();
  auto ra = run_subcommand("regdist", s, a);
  auto rb = run_subcommand("regdist", s, b);
  CHECK(ra.exit_status == 0);
  REQUIRE(ra.files.size() == rb.files.size());
  for (const auto& f : ra.files) {
    const auto name = fs::path(f).filename();
    CHECK(slurp(root / "a" / name) == slurp(root / "b" / name));
  }

  CHECK(run_subcommand("validate", s).exit_status == 0);
  CHECK_THROWS_AS(run_subcommand("frobnicate", s), Error);

  Scene gap = load_scene(fs::path(REGDIST_SCENE_DIR) / "gap.scene");
  try {
    run_subcommand("partition", gap);
    FAIL("no gap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::coverage_gap);
    CHECK(exit_code(e.code()) == 20);
  }
  fs::remove_all(root);
}
