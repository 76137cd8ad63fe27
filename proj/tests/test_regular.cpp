#include <cmath>
#include <random>

#include "doctest.h"
#include "log_periodic.hpp"
#include "regdist/error.hpp"
#include "regdist/regular.hpp"

using namespace regdist;
using regdist::testing::log_points;
using regdist::testing::LogPeriodic;

namespace {

OraclePtr origin() { return LinearPieceOracle::point(Point{0.0}); }

RegularFunction monomial(const OraclePtr& W, double c, int p) {
  // c·x on ℝ \ {0}: k = 1, M = |c|, A = a = |c|
  RegularFunction r;
  r.field = ScalarField::from_jet(1, [c](std::span<const Jet> x) { return x[0] * c; });
  r.cert = {W, 1, p, std::abs(c), std::abs(c), std::abs(c)};
  return r;
}

RegularFunction absolute(const OraclePtr& W, double c, int p) {
  RegularFunction r;
  r.field = ScalarField::from_jet(1, [c](std::span<const Jet> x) { return abs(x[0]) * c; });
  r.cert = {W, 1, p, std::abs(c), std::abs(c), std::abs(c)};
  return r;
}

}  // namespace

TEST_CASE("plateau function values") {
  for (int p = 1; p <= 4; ++p) {
    const Plateau& P = plateau(p);
    CHECK(P.value(0.0) == 1.0);
    CHECK(P.value(1.0) == 0.0);
    CHECK(P.value(0.5) == doctest::Approx(0.5).epsilon(1e-14));
  }
  CHECK(plateau(1).value(0.4) == doctest::Approx(0.896).epsilon(1e-14));
}

TEST_CASE("plateau function is flat at the joints, monotone and in [0,1]") {
  for (int p = 1; p <= 4; ++p) {
    auto P = smoothstep_P(p);
    for (double t : {1.0 / 3.0, 2.0 / 3.0}) {
      CHECK(std::abs(fd_partial(P, Point{t}, MultiIndex({1}), 1e-7)) <= 1e-6);
      for (int q = 1; q <= p; ++q) {
        CHECK(P.derivative(Point{t}, MultiIndex({q})) == 0.0);
        // Taylor remainder from the flat side
        const double eps = 1e-6;
        double bound = plateau(p).sup_derivative(p + 1) * std::pow(eps, p + 1 - q);
        for (int j = 2; j <= p + 1 - q; ++j) bound /= j;
        CHECK(std::abs(P.derivative(Point{t + eps}, MultiIndex({q}))) <= bound * (1 + 1e-9) + 1e-10);
        CHECK(std::abs(P.derivative(Point{t - eps}, MultiIndex({q}))) <= bound * (1 + 1e-9) + 1e-10);
        // P is only C^p at the joints: finite differences converge to 0 at rate h^{p+1-q}
        const double coarse = std::abs(fd_partial(P, Point{t}, MultiIndex({q}), 1e-2));
        const double fine = std::abs(fd_partial(P, Point{t}, MultiIndex({q}), 1e-3));
        CHECK(fine <= coarse * 0.2 + 1e-9);
      }
    }
    double prev = 1.0;
    for (int i = 0; i <= 3000; ++i) {
      const double v = P.value(Point{-0.5 + 2.0 * i / 3000});
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(v <= prev + 1e-15);
      prev = v;
    }
    // the derivative bounds dominate sampled derivatives
    for (int q = 1; q <= p; ++q)
      for (int i = 0; i <= 500; ++i) {
        const double t = 1.0 / 3.0 + i / 1500.0;
        CHECK(std::abs(P.derivative(Point{t}, MultiIndex({q}))) <= plateau(p).sup_derivative(q));
      }
  }
}

TEST_CASE("cert_product examples") {
  auto W = origin();
  auto x = monomial(W, 1.0, 2);
  auto sq = cert_product(x, x);
  CHECK(sq.cert.k == 2);
  CHECK(sq.cert.M == doctest::Approx(4.0));
  CHECK(*sq.cert.sup_bound == doctest::Approx(1.0));
  CHECK(cert_verify(sq, log_points(0.5, 2.0, 50)).verdict() == Outcome::pass);

  auto one = cert_constant(1, 1.0, W, 2);
  auto same = cert_product(one, x);
  CHECK(same.cert.k == 1);
  CHECK(cert_verify(same, log_points(1e-3, 10, 100)).verdict() == Outcome::pass);

  auto a = cert_product(x, absolute(W, 3.0, 2));
  auto b = cert_product(absolute(W, 3.0, 2), x);
  CHECK(a.cert.M == doctest::Approx(b.cert.M));
  CHECK(*a.cert.sup_bound == doctest::Approx(*b.cert.sup_bound));

  RegularFunction bare = x;
  bare.cert.sup_bound.reset();
  CHECK_THROWS_AS(cert_product(bare, x), Error);
  CHECK_THROWS_AS(cert_product(monomial(origin(), 1.0, 2), x), Error);
  CHECK_THROWS_AS(cert_product(monomial(W, 1.0, 3), x), Error);
}

TEST_CASE("cert_reciprocal examples") {
  auto W = origin();
  auto inv = cert_reciprocal(absolute(W, 1.0, 2));
  CHECK(inv.cert.k == -1);
  auto twice = cert_reciprocal(absolute(W, 2.0, 1));
  CHECK(twice.cert.M == doctest::Approx(0.5));
  CHECK(cert_verify(twice, log_points(1e-3, 10, 100)).verdict() == Outcome::pass);

  auto one = cert_reciprocal(cert_constant(1, 1.0, W, 2));
  CHECK(one.field.value(Point{3.0}) == 1.0);

  RegularFunction bare = absolute(W, 1.0, 2);
  bare.cert.lower_bound.reset();
  CHECK_THROWS_AS(cert_reciprocal(bare), Error);

  // a lower bound that lies is caught on evaluation
  RegularFunction liar = absolute(W, 1.0, 2);
  liar.cert.lower_bound = 2.0;
  auto bad = cert_reciprocal(liar);
  try {
    bad.field.value(Point{0.5});
    FAIL("expected ZeroDenominatorDetected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::zero_denominator);
  }
}

TEST_CASE("cert_compose examples") {
  auto W = origin();
  // f bounded in [0, 1] with M = 1
  LogPeriodic base{0, 0.5, 0.5, 1.0, 0.0};
  auto f = base.make(W, 1);
  f.cert.M = 1.0;
  Univariate square{[](double t, int order) {
                      std::vector<double> c(static_cast<std::size_t>(order + 1), 0.0);
                      c[0] = t * t;
                      if (order >= 1) c[1] = 2 * t;
                      if (order >= 2) c[2] = 1;
                      return c;
                    },
                    [](int i, double lo, double hi) {
                      const double m = std::max(std::abs(lo), std::abs(hi));
                      return i == 0 ? m * m : i == 1 ? 2 * m : i == 2 ? 2.0 : 0.0;
                    },
                    "square"};
  auto c = cert_compose(square, f);
  CHECK(c.cert.M == doctest::Approx(2.0));
  CHECK(c.cert.k == 0);

  Univariate identity{[](double t, int order) {
                        std::vector<double> v(static_cast<std::size_t>(order + 1), 0.0);
                        v[0] = t;
                        if (order >= 1) v[1] = 1;
                        return v;
                      },
                      [](int i, double lo, double hi) { return i == 0 ? std::max(std::abs(lo), std::abs(hi)) : i == 1 ? 1.0 : 0.0; },
                      "id"};
  CHECK(cert_compose(identity, f).cert.M == doctest::Approx(f.cert.M));

  auto P = cert_compose(plateau(2).univariate(), base.make(W, 2));
  CHECK(cert_verify(P, log_points(1e-4, 1e2, 200)).verdict() == Outcome::pass);
  CHECK_THROWS_AS(cert_compose(identity, monomial(W, 1.0, 1)), Error);
}

TEST_CASE("cert_verify examples") {
  auto W = origin();
  auto pts = log_points(1e-3, 10, 200);
  auto c = cert_constant(1, 3.0, W, 2);
  c.cert.M = 1.0;
  auto rc = cert_verify(c, pts);
  CHECK(rc.verdict() == Outcome::pass);
  CHECK(rc.fitted("cert_verify/worst_ratio") <= 1.0);

  auto x = monomial(W, 1.0, 2);
  CHECK(cert_verify(x, pts).verdict() == Outcome::pass);

  RegularFunction wiggle;
  wiggle.field = ScalarField::from_jet(1, [](std::span<const Jet> x) { return sin(1.0 / x[0]) * x[0]; });
  wiggle.cert = {W, 1, 1, 2.0, std::nullopt, std::nullopt, {}};
  CHECK(cert_verify(wiggle, pts).verdict() == Outcome::fail);
}

TEST_CASE("combinator constants are sound on log-periodic functions") {
  auto W = origin();
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 1 + trial % 3;
    auto f = LogPeriodic::random(rng, true).make(W, p);
    auto g = LogPeriodic::random(rng, false).make(W, p);
    std::vector<RegularFunction> built{cert_product(f, g), cert_reciprocal(f)};
    LogPeriodic bounded{0, 0.5, 0.4, 1.0 + trial * 0.1, 0.3 * trial};
    built.push_back(cert_compose(plateau(p).univariate(), bounded.make(W, p)));
    for (const auto& h : built) {
      for (int res : {400, 800}) CHECK(cert_verify(h, log_points(1e-3, 1e2, res)).verdict() != Outcome::fail);
    }
  }
}

TEST_CASE("cert_verify worst ratio is refinement stable") {
  auto W = origin();
  auto f = LogPeriodic{1, 1.0, 0.5, 2.0, 0.1}.make(W, 2);
  const double r1 = cert_verify(f, log_points(1e-3, 1e2, 500)).worst_ratio();
  const double r2 = cert_verify(f, log_points(1e-3, 1e2, 1000)).worst_ratio();
  CHECK(std::abs(r2 - r1) <= 0.1 * r1);
  CHECK(r2 <= 1.0);
}
