#include <cmath>

#include "doctest.h"
#include "regdist/approx.hpp"
#include "regdist/apps.hpp"
#include "regdist/error.hpp"

using namespace regdist;

namespace {

RegularFunction exact_distance(const OraclePtr& W, int p) {
  RegularFunction f;
  f.field = distance_field(W);
  f.cert = {W, 1, p, 1.0, 1.0, 1.0, {}};
  return f;
}

std::vector<Point> circle_samples(int count) {
  std::vector<Point> pts;
  for (int k = 0; k < count; ++k) {
    const double a = 2 * M_PI * k / count;
    pts.push_back({std::cos(a), std::sin(a)});
  }
  return pts;
}

}  // namespace

TEST_CASE("zero-set function") {
  OraclePtr origin = LinearPieceOracle::point(Point{0.0});
  auto h1 = zero_set_function(exact_distance(origin, 1), 1);
  CHECK(h1.value(Point{0.3}) == doctest::Approx(0.09));
  CHECK(h1.value(Point{0.0}) == 0.0);
  CHECK(h1.derivative(Point{-0.2}, MultiIndex({1})) == doctest::Approx(-0.4));

  OraclePtr circle = std::make_shared<SphereOracle>(Point{0.0, 0.0}, 1.0);
  auto h2 = zero_set_function(exact_distance(circle, 2), 2);
  CHECK(h2.value(Point{1.1, 0.0}) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(h2.value(Point{0.0, 1.0}) == 0.0);

  RegularFunction bad = exact_distance(origin, 1);
  bad.field = ScalarField::exact(
      1, [](std::span<const Jet> x) { return x[0]; }, [](std::span<const double> x) { return x[0]; });
  auto hb = zero_set_function(bad, 1);
  CHECK(hb.value(Point{0.5}) == doctest::Approx(0.25));
  try {
    hb.value(Point{-0.5});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_positive_f);
  }
}

TEST_CASE("flatness") {
  OraclePtr origin = LinearPieceOracle::point(Point{0.0});
  auto seq = approach_sequence(Point{0.0}, Point{1.0}, 1e-1, 1e-6, 26);
  REQUIRE(seq.size() == 26);
  CHECK(seq.front()[0] == doctest::Approx(0.1));
  CHECK(seq.back()[0] == doctest::Approx(1e-6));

  auto x2 = zero_set_function(exact_distance(origin, 1), 1);
  auto r1 = flatness_check(x2, *origin, 1, seq);
  CHECK(r1.verdict() == Outcome::pass);
  CHECK(r1.fitted("flatness/exponent/(1)") == doctest::Approx(1.0).epsilon(1e-6));

  auto x3 = zero_set_function(exact_distance(origin, 2), 2);
  auto r2 = flatness_check(x3, *origin, 2, seq);
  CHECK(r2.verdict() == Outcome::pass);
  CHECK(r2.fitted("flatness/exponent/(2)") == doctest::Approx(1.0).epsilon(1e-6));
  // exponents drop by one per order
  CHECK(r2.fitted("flatness/exponent/(1)") >= r2.fitted("flatness/exponent/(2)") + 0.9);

  auto abs_x = distance_field(origin);
  CHECK(flatness_check(abs_x, *origin, 1, seq).verdict() == Outcome::fail);
}

TEST_CASE("flatness of the pipeline's h on the two rays") {
  GridSpec g{Box{{-3}, {3}}, 601};
  auto a = approximate(validate_stratification(two_ray_stratification(g), 2, g), 0.1);
  auto h = zero_set_function(a.f, 2);
  OraclePtr origin = LinearPieceOracle::point(Point{0.0});
  for (double side : {1.0, -1.0}) {
    auto rep = flatness_check(h, *origin, 2, approach_sequence(Point{0.0}, Point{side}, 1e-1, 1e-6, 21));
    CHECK(rep.verdict() == Outcome::pass);
    for (int q = 0; q <= 2; ++q)
      CHECK(rep.fitted("flatness/exponent/(" + std::to_string(q) + ")") == doctest::Approx(3 - q).epsilon(0.1 / (3 - q)));
  }
}

TEST_CASE("level sets") {
  OraclePtr origin = LinearPieceOracle::point(Point{0.0});
  auto ls = level_set_extract(distance_field(origin), 0.25, Box{{-1}, {1}}, 101);
  REQUIRE(ls.points.size() == 2);
  CHECK(std::min(ls.points[0][0], ls.points[1][0]) == doctest::Approx(-0.25).epsilon(1e-8));
  CHECK(std::max(ls.points[0][0], ls.points[1][0]) == doctest::Approx(0.25).epsilon(1e-8));
  CHECK_THROWS_AS(level_set_extract(distance_field(origin), 5.0, Box{{-1}, {1}}, 101), Error);

  OraclePtr circle = std::make_shared<SphereOracle>(Point{0.0, 0.0}, 1.0);
  auto d = distance_field(circle);
  auto cs = level_set_extract(d, 0.1, Box{{-1.5, -1.5}, {1.5, 1.5}}, 121);
  bool inner = false, outer = false;
  for (const auto& x : cs.points) {
    const double r = std::hypot(x[0], x[1]);
    CHECK(std::abs(d.value(x) - 0.1) <= 1e-9);
    inner = inner || std::abs(r - 0.9) < 1e-6;
    outer = outer || std::abs(r - 1.1) < 1e-6;
  }
  CHECK(inner);
  CHECK(outer);

  OraclePtr p3 = LinearPieceOracle::point(Point{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(level_set_extract(distance_field(p3), 0.1, Box{{-1, -1, -1}, {1, 1, 1}}, 11), Error);
}

TEST_CASE("Hausdorff convergence with the exact distance") {
  OraclePtr circle = std::make_shared<SphereOracle>(Point{0.0, 0.0}, 1.0);
  const Box box{{-1.5, -1.5}, {1.5, 1.5}};
  auto table = hausdorff_convergence(distance_field(circle), circle_samples(4000), {0.2, 0.1, 0.05, 0.025}, box, 151);
  CHECK(table.converging);
  const double pitch = box.pitch(151);
  for (const auto& row : table.rows) CHECK(std::abs(row.hausdorff - row.t) <= 2 * pitch);
  CHECK_THROWS_AS(hausdorff_convergence(distance_field(circle), circle_samples(10), {0.1, 0.2}, box, 51), Error);
}

TEST_CASE("lambda") {
  const Box box{{-1.6, -1.6}, {1.6, 1.6}};
  for (double eps : {0.2, 0.1, 0.05}) {
    const double l0 = lambda_eps({{0.0, 0.0}}, eps, box, 161);
    CHECK(l0 / eps == doctest::Approx(1.0).epsilon(0.05));
    const double l1 = lambda_eps(circle_samples(4000), eps, box, 161);
    CHECK(l1 / eps == doctest::Approx(1.0).epsilon(0.2));
  }
  try {
    lambda_eps({{0.0, 0.0}}, 10.0, box, 41);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_contour);
  }
}
