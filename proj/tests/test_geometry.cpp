#include <cmath>
#include <random>

#include "doctest.h"
#include "regdist/distance.hpp"
#include "regdist/error.hpp"

using namespace regdist;

TEST_CASE("multi-index enumeration is graded lexicographic") {
  auto one = multi_index_enumerate(1, 0);
  REQUIRE(one.size() == 1);
  CHECK(one[0].order() == 0);

  auto a = multi_index_enumerate(2, 1);
  REQUIRE(a.size() == 3);
  CHECK(a[0].entries() == std::vector<int>{0, 0});
  CHECK(a[1].entries() == std::vector<int>{0, 1});
  CHECK(a[2].entries() == std::vector<int>{1, 0});

  auto b = multi_index_enumerate(2, 2);
  REQUIRE(b.size() == 6);
  std::vector<int> orders;
  for (auto& m : b) orders.push_back(m.order());
  CHECK(orders == std::vector<int>{0, 1, 1, 2, 2, 2});

  CHECK(multi_index_enumerate(3, 3).size() == 20);
  CHECK_THROWS_AS(multi_index_enumerate(0, 1), Error);
}

TEST_CASE("jets carry exact derivatives") {
  // f(x, y) = x^2 y + sin(x) / y at (0.7, 1.3)
  auto v = Jet::variables(Point{0.7, 1.3}, 3);
  Jet f = square(v[0]) * v[1] + sin(v[0]) / v[1];
  const double x = 0.7, y = 1.3;
  CHECK(f.value() == doctest::Approx(x * x * y + std::sin(x) / y));
  CHECK(f.derivative(MultiIndex({1, 0})) == doctest::Approx(2 * x * y + std::cos(x) / y));
  CHECK(f.derivative(MultiIndex({0, 1})) == doctest::Approx(x * x - std::sin(x) / (y * y)));
  CHECK(f.derivative(MultiIndex({1, 1})) == doctest::Approx(2 * x - std::cos(x) / (y * y)));
  CHECK(f.derivative(MultiIndex({0, 2})) == doctest::Approx(2 * std::sin(x) / (y * y * y)));
  CHECK(f.derivative(MultiIndex({3, 0})) == doctest::Approx(-std::cos(x) / y));

  auto w = Jet::variables(Point{2.0}, 4);
  Jet s = sqrt(w[0]);
  CHECK(s.derivative(MultiIndex({3})) == doctest::Approx(3.0 / 8.0 * std::pow(2.0, -2.5)));
  Jet e = exp(log(w[0]));
  CHECK(e.derivative(MultiIndex({1})) == doctest::Approx(1.0));
  CHECK(e.derivative(MultiIndex({2})) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("multivariate Taylor composition") {
  // F(a, b) = a*b expanded at (2, 3): 6 + 3h_a + 2h_b + h_a h_b
  auto v = Jet::variables(Point{1.0}, 3);
  std::vector<Jet> inner{v[0] * 2.0, v[0] * 3.0};  // (2x, 3x) at x = 1
  const JetLayout& L = JetLayout::get(2, 3);
  std::vector<double> c(L.size(), 0.0);
  c[L.find(MultiIndex({0, 0}))] = 6;
  c[L.find(MultiIndex({1, 0}))] = 3;
  c[L.find(MultiIndex({0, 1}))] = 2;
  c[L.find(MultiIndex({1, 1}))] = 1;
  Jet r = compose_taylor(inner, c);  // 6x^2
  CHECK(r.value() == doctest::Approx(6));
  CHECK(r.derivative(MultiIndex({1})) == doctest::Approx(12));
  CHECK(r.derivative(MultiIndex({2})) == doctest::Approx(12));
  CHECK(r.derivative(MultiIndex({3})) == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("fd_partial examples") {
  auto sq = ScalarField::from_values(1, [](std::span<const double> x) { return x[0] * x[0]; }, {});
  CHECK(fd_partial(sq, Point{1.0}, MultiIndex({1}), 1e-3) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fd_partial(sq, Point{0.0}, MultiIndex({2}), 1e-3) == doctest::Approx(2.0).epsilon(1e-6));
  auto xy = ScalarField::from_values(2, [](std::span<const double> x) { return x[0] * x[1]; }, {});
  CHECK(fd_partial(xy, Point{3.0, 5.0}, MultiIndex({1, 1}), 1e-3) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(fd_partial(xy, Point{3.0, 5.0}, MultiIndex({0, 0}), 1e-3), Error);
}

TEST_CASE("fd_partial respects the domain") {
  auto f = ScalarField::from_values(
      1, [](std::span<const double> x) { return std::sqrt(x[0]); }, {},
      [](std::span<const double> x) { return x[0] > 0.0; });
  try {
    fd_partial(f, Point{1e-4}, MultiIndex({2}), 1e-3);
    FAIL("expected a stencil error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::stencil_outside_domain);
  }
}

TEST_CASE("fd_partial matches jets on low-degree polynomials") {
  // degree <= 2|alpha| polynomials, default step policy
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    double c[6];
    for (double& v : c) v = U(rng);
    auto jf = [c](std::span<const Jet> x) {
      return c[0] * pow(x[0], 4) + c[1] * square(x[0]) * square(x[1]) + c[2] * pow(x[1], 3) + c[3] * x[0] * x[1] + c[4] * x[0] + c[5];
    };
    auto exact = ScalarField::from_jet(2, jf);
    Point x{U(rng), U(rng)};
    const double step = fd_step_for_distance(1.0);
    for (const auto& a : multi_index_enumerate(2, 2)) {
      if (a.order() == 0) continue;
      double e = exact.derivative(x, a);
      double d = fd_partial(exact, x, a, step);
      CHECK(std::abs(d - e) <= 1e-6 * std::max(1.0, std::abs(e)));
    }
  }
}

TEST_CASE("G_eta membership examples") {
  auto W = LinearPieceOracle::point(Point{0.0});
  auto Z = LinearPieceOracle::point(Point{1.0});
  CHECK(g_eta_contains(*Z, *W, 0.1, Point{1.05}) == Verdict::in);
  CHECK(g_eta_contains(*Z, *W, 0.1, Point{2.0}) == Verdict::out);
  CHECK(g_eta_contains(*Z, *W, 0.1, Point{1.0}) == Verdict::in);
  CHECK_THROWS_AS(g_eta_contains(*Z, *W, 0.1, Point{0.0}), Error);
  EmptyOracle none(1);
  CHECK(g_eta_contains(none, *W, 0.5, Point{1.0}) == Verdict::out);

  // sampled W: margin band produces ambiguous verdicts
  PointCloudOracle Wc({Point{0.0}}, 0.01);
  CHECK(g_eta_contains(*Z, Wc, 0.1, Point{1.1105}) == Verdict::ambiguous);
}

TEST_CASE("G_eta membership is monotone in eta") {
  auto W = LinearPieceOracle::ray(Point{0.0, 0.0}, Point{-1.0, 0.0});
  auto Z = LinearPieceOracle::ray(Point{0.0, 0.0}, Point{1.0, 0.0});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    Point x{U(rng), U(rng)};
    bool seen_in = false;
    for (double eta : {0.05, 0.1, 0.2, 0.4, 0.8}) {
      auto v = g_eta_contains(*Z, *W, eta, x);
      if (seen_in) CHECK(v == Verdict::in);
      seen_in = seen_in || v == Verdict::in;
    }
  }
}

TEST_CASE("compose bound") {
  CHECK(g_eta_compose_bound(0.1, 0.2) == doctest::Approx(0.32));
  CHECK(g_eta_compose_bound(1, 1) == doctest::Approx(3));
  CHECK(g_eta_compose_bound(1e-12, 0.3) == doctest::Approx(0.3));
}

TEST_CASE("analytic distances") {
  auto seg = LinearPieceOracle::segment(Point{0, 0}, Point{2, 0});
  CHECK(seg->distance(Point{1, 1}) == doctest::Approx(1));
  CHECK(seg->distance(Point{3, 0}) == doctest::Approx(1));
  SphereOracle circle(Point{0, 0}, 1.0);
  CHECK(circle.distance(Point{0.5, 0}) == doctest::Approx(0.5));
  CHECK(circle.distance(Point{0, 3}) == doctest::Approx(2));
  PolyGraphOracle parabola({0, 0, 1}, -10, 10);
  CHECK(parabola.distance(Point{0, -1}) == doctest::Approx(1));
  CHECK(parabola.distance(Point{0, 1}) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-9));

  // jets of analytic distances agree with finite differences
  auto f = distance_field(std::make_shared<SphereOracle>(circle));
  Point x{0.3, 1.7};
  for (const auto& a : multi_index_enumerate(2, 2)) {
    if (a.order() == 0) continue;
    CHECK(f.derivative(x, a) == doctest::Approx(fd_partial(f, x, a, 1e-3)).epsilon(1e-5));
  }
  auto u = make_union({seg, std::make_shared<SphereOracle>(Point{5, 5}, 1.0)}, 2);
  CHECK(u->distance(Point{5, 5}) == doctest::Approx(1));
  CHECK(make_union({}, 2)->empty());
}

TEST_CASE("hausdorff distance") {
  std::vector<Point> a{{0.0}, {1.0}}, b{{0.0}};
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK(hausdorff_distance({{0.0}}, {{3.0}}) == doctest::Approx(3));
  CHECK(hausdorff_distance(a, b) == doctest::Approx(1));
  CHECK(hausdorff_distance(b, a) == doctest::Approx(1));
  CHECK_THROWS_AS(hausdorff_distance(a, {}), Error);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto cloud = [&](int n) {
    std::vector<Point> s;
    for (int i = 0; i < n; ++i) s.push_back({U(rng), U(rng)});
    return s;
  };
  for (int t = 0; t < 50; ++t) {
    auto A = cloud(1 + t % 7), B = cloud(1 + t % 5), C = cloud(2 + t % 3);
    CHECK(hausdorff_distance(A, C) <= hausdorff_distance(A, B) + hausdorff_distance(B, C) + 1e-12);
  }
}

TEST_CASE("kd-tree agrees with brute force") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < 500; ++i) pts.push_back({U(rng), U(rng), U(rng)});
  KdTree tree(pts);
  for (int k = 0; k < 200; ++k) {
    Point x{U(rng), U(rng), U(rng)};
    double best = kInfinity;
    for (auto& p : pts) best = std::min(best, dist(x, p));
    CHECK(tree.nearest(x).distance == doctest::Approx(best));
  }
}
