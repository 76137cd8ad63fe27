#include <cmath>

#include "doctest.h"
#include "regdist/cells.hpp"
#include "regdist/error.hpp"

using namespace regdist;

namespace {

GridSpec line_grid(double lo, double hi, int res = 101) { return GridSpec{Box{{lo}, {hi}}, res}; }
GridSpec plane_grid(int res = 41) { return GridSpec{Box{{-1, -1}, {1, 1}}, res}; }

CellPtr graph_over(double a, double b, CellFunction phi, double M, const GridSpec& g) {
  return Cell::graph(2, Cell::interval(a, b, g), {std::move(phi)}, M, {}, g);
}

}  // namespace

TEST_CASE("lip_to_L") {
  CHECK(lip_to_L(0) == 1.0);
  CHECK(lip_to_L(1) == doctest::Approx(0.7071067811865476).epsilon(1e-15));
  CHECK(lip_to_L(2) == doctest::Approx(0.4472135954999579).epsilon(1e-15));
  CHECK(lip_to_L(3) < lip_to_L(2.5));
  CHECK_THROWS_AS(lip_to_L(-1), Error);
}

TEST_CASE("validate_cell examples") {
  auto g = plane_grid(101);
  auto flat = graph_over(0, kInfinity, CellFunction::of(Poly(1, {0.0})), 0.0, g);
  auto r0 = validate_cell(*flat, 2, g);
  CHECK(r0.verdict() == Outcome::pass);
  CHECK(r0.fitted("validate_cell/M_hat") == 0.0);

  GridSpec unit{Box{{0, -1}, {1, 1}}, 101};
  auto diag = graph_over(0, 1, CellFunction::of(Poly(1, {0.0, 1.0})), 1.0, unit);
  auto r1 = validate_cell(*diag, 2, unit);
  CHECK(r1.verdict() == Outcome::pass);
  CHECK(r1.fitted("validate_cell/M_hat") == doctest::Approx(1.0));

  auto root = ScalarField::from_values(
      1, [](std::span<const double> u) { return std::sqrt(u[0]); },
      [](std::span<const double> u) { return std::max(1e-9, 1e-3 * u[0]); },
      [](std::span<const double> u) { return u[0] > 0.0; });
  auto sq = graph_over(0, 1, CellFunction::of(root), 1.0, unit);
  CHECK(validate_cell(*sq, 1, unit).verdict() == Outcome::fail);
}

TEST_CASE("validate_cell is monotone in p") {
  GridSpec unit{Box{{0, -1}, {1, 1}}, 61};
  auto cubic = graph_over(0, 1, CellFunction::of(Poly(1, {0, 0.1, 0.2, 0.3})), 1.5, unit);
  auto r3 = validate_cell(*cubic, 3, unit);
  auto r2 = validate_cell(*cubic, 2, unit);
  auto r1 = validate_cell(*cubic, 1, unit);
  CHECK(r3.verdict() == Outcome::pass);
  CHECK(r2.verdict() == Outcome::pass);
  CHECK(r1.verdict() == Outcome::pass);
  CHECK(r1.fitted("validate_cell/M_hat") <= r2.fitted("validate_cell/M_hat"));
  CHECK(r2.fitted("validate_cell/M_hat") <= r3.fitted("validate_cell/M_hat"));
}

TEST_CASE("distance envelope of graph cells") {
  GridSpec g{Box{{-3, -3}, {3, 3}}, 41};
  auto flat = graph_over(-kInfinity, kInfinity, CellFunction::of(Poly(1, {0.0})), 0.0, g);
  CHECK(flat->closure()->distance(Point{0.4, -0.7}) == doctest::Approx(0.7));
  CHECK(cell_distance_envelope_check(*flat, *flat->closure(), Point{0.4, -0.7}).passed());

  auto diag = graph_over(-kInfinity, kInfinity, CellFunction::of(Poly(1, {0.0, 1.0})), 1.0, g);
  CHECK(diag->closure()->distance(Point{0, 1}) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(cell_distance_envelope_check(*diag, *diag->closure(), Point{0, 1}).passed());

  auto half = graph_over(0, kInfinity, CellFunction::of(Poly(1, {0.0, 1.0})), 1.0, g);
  CHECK(half->closure()->distance(Point{-1, 0}) == doctest::Approx(1));
  CHECK(half->boundary()->distance(Point{-1, 0}) == doctest::Approx(1));
  CHECK(cell_distance_envelope_check(*half, *half->closure(), Point{-1, 0}).passed());

  // the sandwich holds at every grid point of a validated graph cell
  auto curved = graph_over(-1, 2, CellFunction::of(Poly(1, {0.0, 0.5, 0.25})), 1.5, g);
  for (const auto& x : g.lattice()) CHECK(cell_distance_envelope_check(*curved, *curved->closure(), x).verdict() != Outcome::fail);
}

TEST_CASE("graph_compose_g examples") {
  GridSpec unit{Box{{0, -1}, {1, 2}}, 51};
  auto diag = graph_over(0, 1, CellFunction::of(Poly(1, {0.0, 1.0})), 1.0, unit);
  auto sum = ScalarField::from_jet(2, [](std::span<const Jet> x) { return x[0] + x[1]; });
  auto c = graph_compose_g(*diag, sum, 2, unit);
  CHECK(c.field.value(Point{0.3}) == doctest::Approx(0.6));
  CHECK(c.field.derivative(Point{0.3}, MultiIndex({1})) == doctest::Approx(2));
  CHECK(c.report.passed());

  auto flat = graph_over(0, 1, CellFunction::of(Poly(1, {0.0})), 0.0, unit);
  auto absw = ScalarField::from_values(2, [](std::span<const double> x) { return std::abs(x[1]); }, {});
  CHECK(graph_compose_g(*flat, absw, 2, unit).field.value(Point{0.5}) == 0.0);
  auto constant = graph_compose_g(*flat, ScalarField::constant(2, 4.0), 2, unit);
  CHECK(constant.field.value(Point{0.5}) == 4.0);
  CHECK(constant.B == 0.0);
}

TEST_CASE("builder stratifications validate") {
  auto g1 = line_grid(-2, 2, 201);
  auto two = validate_stratification(two_ray_stratification(g1), 2, g1);
  CHECK(two.report.verdict() == Outcome::pass);

  auto g2 = plane_grid(41);
  auto half = validate_stratification(half_line_stratification(g2), 2, g2);
  CHECK(half.report.verdict() == Outcome::pass);
  REQUIRE(half.s.strata.size() == 3);
  CHECK(half.s.strata[0].id == "axis");
  // both half-planes have the axis in their frontier
  CHECK(half.fits[1].boundary_strata == std::vector<std::size_t>{0});
  CHECK(half.fits[2].boundary_strata == std::vector<std::size_t>{0});

  GridSpec g3{Box{{-2, -2}, {2, 2}}, 41};
  auto circ = validate_stratification(unit_circle_stratification(g3), 2, g3);
  CHECK(circ.report.verdict() == Outcome::pass);

  auto pts = validate_stratification(point_set_stratification({-1, 0.5}, g1), 2, g1);
  CHECK(pts.report.verdict() == Outcome::pass);
  CHECK(pts.s.strata.size() == 3);

  auto parab = validate_stratification(poly_curve_stratification(Poly(1, {0, 0, 0.5}), g2), 2, g2);
  CHECK(parab.report.verdict() != Outcome::fail);
}

TEST_CASE("validate_stratification detects defects") {
  auto g = line_grid(-2, 2, 201);
  Stratification overlap;
  overlap.n = 1;
  overlap.W = LinearPieceOracle::point(Point{0.0});
  overlap.strata.push_back({"a", Cell::interval(-kInfinity, 1.0, g)});
  overlap.strata.push_back({"b", Cell::interval(0.0, kInfinity, g)});
  auto r = validate_stratification(overlap, 2, g);
  CHECK(r.report.verdict() == Outcome::fail);

  Stratification gap = two_ray_stratification(g);
  gap.strata.pop_back();
  CHECK(validate_stratification(gap, 2, g).report.verdict() == Outcome::fail);

  Stratification none;
  none.W = overlap.W;
  CHECK_THROWS_AS(validate_stratification(none, 2, g), Error);

  // half-plane frontier without the axis stratum
  auto g2 = plane_grid(41);
  auto half = half_line_stratification(g2);
  half.strata.erase(half.strata.begin());
  CHECK(validate_stratification(half, 2, g2).report.verdict() == Outcome::fail);
}

TEST_CASE("strata are reordered by dimension without changing verdicts") {
  auto g2 = plane_grid(31);
  auto s = half_line_stratification(g2);
  std::swap(s.strata[0], s.strata[2]);
  auto v = validate_stratification(s, 2, g2);
  CHECK(v.s.strata[0].id == "axis");
  CHECK(v.report.fitted("stratification/reordered_by_dimension") == 1.0);
  CHECK(v.report.verdict() == Outcome::pass);
}
