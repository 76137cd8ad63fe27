#include <cmath>
#include <random>

#include "doctest.h"
#include "regdist/bump.hpp"
#include "regdist/error.hpp"

using namespace regdist;

namespace {

GridSpec half_line_grid(int res = 41) { return GridSpec{Box{{-2, -2}, {2, 2}}, res}; }

// W = {0} ⊂ ℝ with a point stratum at 1 that is not part of W
Stratification split_ray(const GridSpec& g) {
  Stratification s;
  s.n = 1;
  s.W = LinearPieceOracle::point(Point{0.0});
  s.strata.push_back({"one", Cell::graph(1, nullptr, {CellFunction::of(Poly(0, {1.0}))}, 0.0, {}, g)});
  s.strata.push_back({"negative", Cell::interval(-kInfinity, 0.0, g)});
  s.strata.push_back({"inner", Cell::interval(0.0, 1.0, g)});
  s.strata.push_back({"outer", Cell::interval(1.0, kInfinity, g)});
  return s;
}

std::vector<Point> random_points(int n, int count, double lo, double hi, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point> pts;
  for (int i = 0; i < count; ++i) {
    Point x(static_cast<std::size_t>(n));
    for (auto& c : x) c = u(rng);
    pts.push_back(x);
  }
  return pts;
}

}  // namespace

TEST_CASE("graph bump constants") {
  const auto c = graph_bump_constants(1.0, 1.0 / 1.5, 0.5);
  CHECK(c.delta == 0.5);
  CHECK(c.gamma == doctest::Approx(0.054).epsilon(1e-14));
  CHECK(c.rho == doctest::Approx(0.9 * std::sqrt(0.054) / (std::sqrt(3.0) + std::sqrt(0.054))).epsilon(1e-14));
  CHECK(c.rho == doctest::Approx(0.10647).epsilon(1e-4));
  // ρ′ = 0.5 needs η′ > 0.5, which (3.5) forbids for L = 1
  CHECK(c.check().verdict() == Outcome::fail);
  CHECK(graph_bump_constants(1.0, 0.5, 0.2).check().verdict() == Outcome::pass);
  CHECK_THROWS_AS(graph_bump_constants(1.0, 1.0, 0.4), Error);
  try {
    graph_bump_constants(0.5, 0.6, 0.1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::eta_too_large);
  }
}

TEST_CASE("bump_point") {
  OraclePtr W = LinearPieceOracle::point(Point{0.0});
  auto b = bump_point(Point{1.0}, W, 0.4, 2);
  CHECK(b.rho == doctest::Approx(0.1));
  const double r = 1.0 / 9.0, R = 0.9 * 0.4 / 1.4;
  CHECK(b.value(Point{1.0}) == 1.0);
  CHECK(b.value(Point{1.3}) == 0.0);
  for (int i = 0; i <= 200; ++i) {
    const double x = 0.5 + i / 200.0;
    const double v = b.value(Point{x});
    if (std::abs(x - 1.0) <= r) CHECK(v == 1.0);
    if (std::abs(x - 1.0) >= R) CHECK(v == 0.0);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  std::vector<Point> pts;
  for (int i = 0; i <= 2000; ++i) pts.push_back(Point{-3.0 + 6.0 * i / 2000.0});
  CHECK(bump_check(b, W, pts).verdict() == Outcome::pass);
  CHECK(cert_verify(b.psi, pts).verdict() != Outcome::fail);

  // large η shrinks ρ until r < R
  auto wide = bump_point(Point{1.0}, W, 3.0, 1);
  CHECK(wide.rho < 0.75);
  CHECK(wide.value(Point{1.0}) == 1.0);
  CHECK_THROWS_AS(bump_point(Point{0.0}, W, 0.4, 1), Error);

  OraclePtr W2 = LinearPieceOracle::point(Point{0.0, 0.0});
  auto b2 = bump_point(Point{1.0, 1.0}, W2, 0.5, 2);
  auto pts2 = random_points(2, 4000, -1, 3, 7);
  CHECK(bump_check(b2, W2, pts2).verdict() == Outcome::pass);
  CHECK(cert_verify(b2.psi, pts2).verdict() != Outcome::fail);
}

TEST_CASE("bump_cell on the half-line axis") {
  auto g = half_line_grid();
  auto ctx = validate_stratification(half_line_stratification(g), 2, g);
  REQUIRE(ctx.ok());
  REQUIRE(ctx.s.strata[0].id == "axis");
  auto b = bump_cell(ctx, 0, 0.5, 2);
  CHECK(b.c.check().verdict() == Outcome::pass);
  // Z′ = ∂Z \ W is empty, so ρ′ = 0.9·η′
  CHECK(b.c.rho_prime == doctest::Approx(0.9 * 0.25));

  for (double u : {0.01, 0.3, 1.0, 1.9}) CHECK(b.value(Point{u, 0.0}) == 1.0);

  auto pts = random_points(2, 20000, -2, 2, 11);
  // concentrate samples near the axis as well
  for (int i = 0; i < 4000; ++i) {
    const double u = 0.01 + 1.9 * i / 4000.0;
    pts.push_back({u, (i % 41 - 20) * 0.01 * u});
  }
  auto rep = bump_check(b, ctx.s.W, pts);
  CHECK(rep.verdict() == Outcome::pass);
  CHECK(rep.fitted("bump/axis/plateau_points") >= 100);
  CHECK(rep.fitted("bump/axis/support_points") >= 100);

  // away from the slab and outside the wedge ψ equals λ = 0
  const auto& dZ = *ctx.s.strata[0].cell->boundary();
  const auto& Z = *ctx.s.strata[0].cell->closure();
  for (const auto& x : pts)
    if (Z.distance(x) > b.c.delta * dZ.distance(x)) CHECK(b.value(x) == 0.0);

  CHECK(cert_verify(b.psi, pts).verdict() != Outcome::fail);
  CHECK_THROWS_AS(bump_cell(ctx, 0, 1.0, 2), Error);
  CHECK_THROWS_AS(bump_cell(ctx, 1, 0.5, 2), Error);
}

TEST_CASE("bump_open_cell") {
  auto g = GridSpec{Box{{-3}, {3}}, 601};
  auto ctx = validate_stratification(two_ray_stratification(g), 2, g);
  auto b = bump_open_cell(ctx, 1, 0.4, 2);
  // ∂Z ⊂ W: the bump is the indicator of Z
  CHECK(b.value(Point{0.5}) == 1.0);
  CHECK(b.value(Point{-0.5}) == 0.0);
  CHECK(b.value(Point{1e-9}) == 1.0);

  // recursion through the point stratum {1}
  auto split = validate_stratification(split_ray(g), 2, g);
  REQUIRE(split.s.strata[0].id == "one");
  std::size_t inner = 0;
  for (std::size_t i = 0; i < split.s.strata.size(); ++i)
    if (split.s.strata[i].id == "inner") inner = i;
  REQUIRE(split.fits[inner].boundary_strata == std::vector<std::size_t>{0});
  auto bi = bump_open_cell(split, inner, 0.4, 2);
  std::vector<Point> pts;
  for (int i = 0; i <= 6000; ++i) pts.push_back(Point{-3.0 + 6.0 * i / 6000.0});
  auto rep = bump_check(bi, split.s.W, pts);
  CHECK(rep.verdict() == Outcome::pass);
  CHECK(bi.value(Point{0.5}) == 1.0);
  CHECK(bi.value(Point{1.0 + 1e-3}) == 1.0);
  CHECK(bi.value(Point{2.0}) == 0.0);
  CHECK(bi.value(Point{-0.5}) == 0.0);
  CHECK(cert_verify(bi.psi, pts).verdict() != Outcome::fail);
}

TEST_CASE("bump_union") {
  OraclePtr W = LinearPieceOracle::point(Point{0.0});
  auto a = bump_point(Point{1.0}, W, 0.4, 2);
  auto b = bump_point(Point{-2.0}, W, 0.4, 2);
  auto u = bump_union({a, b});
  CHECK(u.value(Point{1.0}) == 1.0);
  CHECK(u.value(Point{-2.0}) == 1.0);
  CHECK(u.value(Point{0.5}) == 0.0);
  CHECK(u.rho == doctest::Approx(0.1));
  std::vector<Point> pts;
  for (int i = 0; i <= 3000; ++i) pts.push_back(Point{-3.0 + 6.0 * i / 3000.0});
  CHECK(bump_check(u, W, pts).verdict() == Outcome::pass);
  CHECK(cert_verify(u.psi, pts).verdict() != Outcome::fail);
  CHECK(1.0 - plateau(3).value(0.5) == doctest::Approx(0.5).epsilon(1e-15));

  auto c = bump_point(Point{1.0}, W, 0.3, 2);
  CHECK_THROWS_AS(bump_union({a, c}), Error);
  OraclePtr W2 = LinearPieceOracle::point(Point{0.0});
  auto d = bump_point(Point{1.0}, W2, 0.4, 2);
  try {
    bump_union({a, d});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::mixed_reference);
  }
}

TEST_CASE("partition of unity on the fixtures") {
  SUBCASE("two rays") {
    auto g = GridSpec{Box{{-3}, {3}}, 601};
    auto ctx = validate_stratification(two_ray_stratification(g), 2, g);
    auto part = partition_of_unity(ctx, 0.5, 2);
    REQUIRE(part.size() == 2);
    CHECK(part.omega[0].field.value(Point{-1.0}) == 1.0);
    CHECK(part.omega[1].field.value(Point{-1.0}) == 0.0);
    CHECK(part.omega[1].field.value(Point{2.0}) == 1.0);
    auto rep = partition_check(part, ctx, ctx.grid.lattice());
    CHECK(rep.verdict() == Outcome::pass);
  }
  SUBCASE("half-line") {
    auto g = half_line_grid(61);
    auto ctx = validate_stratification(half_line_stratification(g), 2, g);
    auto part = partition_of_unity(ctx, 0.5, 2);
    REQUIRE(part.size() == 3);
    CHECK(part.report.verdict() == Outcome::pass);
    auto pts = random_points(2, 5000, -2, 2, 3);
    auto lat = ctx.grid.lattice();
    pts.insert(pts.end(), lat.begin(), lat.end());
    auto rep = partition_check(part, ctx, pts);
    CHECK(rep.verdict() == Outcome::pass);
    CHECK(part.omega[0].field.value(Point{1.0, 0.0}) == 1.0);
    CHECK(part.omega[1].field.value(Point{0.0, 1.0}) == 1.0);
    CHECK(part.omega[2].field.value(Point{1.0, -1.0}) == 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(cert_verify(part.omega[i], pts).verdict() != Outcome::fail);
  }
  SUBCASE("single stratum") {
    auto g = GridSpec{Box{{-3}, {3}}, 101};
    Stratification s;
    s.n = 1;
    s.W = std::make_shared<EmptyOracle>(1);
    s.strata.push_back({"line", Cell::interval(-kInfinity, kInfinity, g)});
    auto ctx = validate_stratification(s, 2, g);
    auto part = partition_of_unity(ctx, 0.5, 2);
    for (const auto& x : g.lattice()) CHECK(part.omega[0].field.value(x) == 1.0);
  }
}

TEST_CASE("partition with a gap") {
  auto g = GridSpec{Box{{-3}, {3}}, 101};
  Stratification s = two_ray_stratification(g);
  s.strata.pop_back();
  auto ctx = validate_stratification(s, 2, g);
  CHECK_FALSE(ctx.ok());
  try {
    partition_of_unity(ctx, 0.5, 2);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::coverage_gap);
    CHECK(exit_code(e.code()) == 20);
  }
}
