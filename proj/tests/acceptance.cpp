// One line per acceptance criterion; exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "log_periodic.hpp"
#include "regdist/approx.hpp"
#include "regdist/apps.hpp"
#include "regdist/error.hpp"
#include "regdist/run.hpp"
#include "regdist/scene.hpp"

using namespace regdist;
using Clock = std::chrono::steady_clock;

namespace {

Scene fixture(const char* name) { return load_scene((std::filesystem::path(REGDIST_SCENE_DIR) / name).string()); }

ValidatedStratification validated(const Scene& s) {
  return validate_stratification(build_stratification(s), s.p, s.grid);
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<Point> circle_samples(int count) {
  std::vector<Point> pts;
  for (int k = 0; k < count; ++k) {
    const double a = 2 * M_PI * k / count;
    pts.push_back({std::cos(a), std::sin(a)});
  }
  return pts;
}

struct Result {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) why << "; ";
      why << what;
      ok = false;
    }
  }
};

// two rays: |f − |x|| ≤ κ|x|, certificate, runtime
void two_ray(Result& r) {
  const auto t0 = Clock::now();
  Scene s = fixture("two_ray.scene");
  auto a = approximate(validated(s), s.kappa);
  r.expect(a.report.passed(), "pipeline report");
  const auto pts = testing::log_points(1e-4, 1e2, 500);
  double worst = 0.0;
  for (const auto& x : pts) worst = std::max(worst, std::abs(a.f.field.value(x) - std::abs(x[0])) / std::abs(x[0]));
  r.expect(worst <= s.kappa, "relative error " + fmt17(worst));
  auto cert = cert_verify(a.f, pts);
  r.expect(cert.verdict() == Outcome::pass && cert.worst_ratio() <= 1.0, "worst ratio " + fmt17(cert.worst_ratio()));
  const double t = seconds_since(t0);
  r.expect(t < 10.0, "runtime " + fmt17(t));
  r.why << (r.ok ? "" : " | ") << "max rel err " << worst << ", worst ratio " << cert.worst_ratio() << ", " << t
        << " s";
}

// half-line: fitted A and B, B stable under grid doubling
void half_line(Result& r) {
  const auto t0 = Clock::now();
  Scene s = fixture("half_line.scene");
  auto coarse = regularized_distance(build_stratification(s), s.p, s.kappa, s.grid);
  GridSpec fine = s.grid;
  fine.resolution = 2 * s.grid.resolution;
  auto refined = regularized_distance(build_stratification(s), s.p, s.kappa, fine);
  r.expect(coarse.report.passed() && refined.report.passed(), "regularized_distance report");
  const double A_bound = 1.05 / (1.0 - s.kappa);
  r.expect(coarse.A_fitted <= A_bound, "A " + fmt17(coarse.A_fitted));
  const double drift = std::abs(refined.B_fitted - coarse.B_fitted) / coarse.B_fitted;
  r.expect(drift <= 0.1, "B drift " + fmt17(drift));
  const double t = seconds_since(t0);
  r.expect(t < 120.0, "runtime " + fmt17(t));
  r.why << (r.ok ? "" : " | ") << "A " << coarse.A_fitted << ", B " << coarse.B_fitted << " -> " << refined.B_fitted
        << " (" << 100 * drift << "%), " << t << " s";
}

// partition of unity on both fixtures
void partitions(Result& r) {
  for (const char* name : {"two_ray.scene", "half_line.scene"}) {
    Scene s = fixture(name);
    auto ctx = validated(s);
    auto part = partition_of_unity(ctx, s.eta.value_or(0.5), s.p);
    const auto lattice = ctx.grid.lattice();
    double sum_err = 0.0;
    bool in_range = true;
    for (const auto& x : lattice) {
      if (ctx.s.W->distance(x) == 0.0) continue;
      double sum = 0.0;
      for (const auto& w : part.omega) {
        const double v = w.field.value(x);
        in_range = in_range && v >= 0.0 && v <= 1.0;
        sum += v;
      }
      sum_err = std::max(sum_err, std::abs(sum - 1.0));
    }
    auto rep = partition_check(part, ctx, lattice);
    r.expect(sum_err <= 1e-12, std::string(name) + " sum error " + fmt17(sum_err));
    r.expect(in_range, std::string(name) + " range");
    r.expect(rep.failures() == 0 && rep.passed(), std::string(name) + " support");
    r.why << (r.ok ? "" : " | ") << name << ": " << lattice.size() << " points, sum err " << sum_err << "; ";
  }
}

// bump of the graph cell of the half-line fixture
void bump(Result& r) {
  Scene s = fixture("half_line.scene");
  auto ctx = validated(s);
  std::size_t index = ctx.s.strata.size();
  for (std::size_t i = 0; i < ctx.s.strata.size(); ++i)
    if (ctx.s.strata[i].id == s.bump_target) index = i;
  if (index == ctx.s.strata.size()) return r.expect(false, "no stratum " + s.bump_target);
  auto b = bump_stratum(ctx, index, s.eta.value_or(0.5), s.p);
  r.expect(b.c.check().passed(), "constant inequalities");

  auto pts = ctx.grid.lattice();
  std::mt19937 rng(s.seed);
  std::uniform_real_distribution<double> U(0.01, 1.9), V(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double u = U(rng);
    pts.push_back({u, 0.2 * V(rng) * u});
  }
  auto rep = bump_check(b, ctx.s.W, pts);
  const double plateau = rep.fitted("bump/" + s.bump_target + "/plateau_points");
  const double support = rep.fitted("bump/" + s.bump_target + "/support_points");
  r.expect(rep.passed(), "bump_check");
  r.expect(plateau >= 100 && support >= 100, "too few samples");
  r.why << (r.ok ? "" : " | ") << plateau << " plateau and " << support << " support points, rho " << b.rho;
}

// combinator constants against exact derivatives
void combinators(Result& r) {
  auto W = LinearPieceOracle::point(Point{0.0});
  std::mt19937 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 1 + trial % 3;
    auto f = testing::LogPeriodic::random(rng, true).make(W, p);
    auto g = testing::LogPeriodic::random(rng, false).make(W, p);
    testing::LogPeriodic bounded{0, 0.5, 0.4, 1.0 + trial * 0.1, 0.3 * trial};
    const std::vector<RegularFunction> built{cert_product(f, g), cert_reciprocal(f),
                                             cert_compose(plateau(p).univariate(), bounded.make(W, p))};
    for (const auto& h : built)
      for (int res : {400, 800}) {
        auto rep = cert_verify(h, testing::log_points(1e-3, 1e2, res));
        r.expect(rep.verdict() != Outcome::fail, "trial " + std::to_string(trial));
        worst = std::max(worst, rep.worst_ratio());
      }
  }
  r.why << (r.ok ? "" : " | ") << "60 certificates, worst ratio " << worst;
}

// union identity and composition containment of relative neighbourhoods
void neighbourhoods(Result& r) {
  auto W = LinearPieceOracle::ray(Point{0.0, 0.0}, Point{-1.0, 0.0});
  auto Z = LinearPieceOracle::ray(Point{0.0, 0.0}, Point{1.0, 0.0});
  auto Z2 = LinearPieceOracle::point(Point{0.3, 0.8});
  auto both = make_union({Z, Z2}, 2);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  int mismatches = 0, violations = 0, probes = 0;
  for (int k = 0; k < 1000; ++k) {
    Point x{U(rng), U(rng)};
    if (W->distance(x) == 0.0) continue;
    for (double eta : {0.1, 0.3, 0.5}) {
      const auto a = g_eta_contains(*Z, *W, eta, x), b = g_eta_contains(*Z2, *W, eta, x);
      const auto expect = (a == Verdict::in || b == Verdict::in) ? Verdict::in : Verdict::out;
      if (g_eta_contains(*both, *W, eta, x) != expect) ++mismatches;
    }
  }
  // Z′ = a ray at angle θ with sin θ < ε lies in G_ε(Z, W)
  for (double eps : {0.1, 0.3, 0.5}) {
    const double th = std::asin(0.99 * eps);
    auto Zp = LinearPieceOracle::ray(Point{0.0, 0.0}, Point{std::cos(th), std::sin(th)});
    for (double eta : {0.1, 0.3, 0.5}) {
      const double outer = g_eta_compose_bound(eps, eta);
      for (int k = 0; k < 4000; ++k) {
        Point x{U(rng), U(rng)};
        if (W->distance(x) == 0.0 || g_eta_contains(*Zp, *W, eta, x) != Verdict::in) continue;
        ++probes;
        if (g_eta_contains(*Z, *W, outer, x) == Verdict::out) ++violations;
      }
    }
  }
  r.expect(mismatches == 0, std::to_string(mismatches) + " union mismatches");
  r.expect(violations == 0, std::to_string(violations) + " containment violations");
  r.expect(probes >= 1000, "too few composition probes");
  r.why << (r.ok ? "" : " | ") << "3000 union verdicts, " << probes << " composition probes";
}

// flatness of h = f^{p+1} at the origin
void flatness(Result& r) {
  Scene s = fixture("two_ray.scene");
  auto a = approximate(validated(s), s.kappa);
  auto h = zero_set_function(a.f, s.p);
  double worst = 0.0;
  for (double side : {1.0, -1.0}) {
    auto rep = flatness_check(h, *a.S.s.W, s.p, approach_sequence(Point{0.0}, Point{side}, 1e-1, 1e-6, 21));
    r.expect(rep.passed(), "flatness_check");
    for (int q = 0; q <= s.p; ++q) {
      const double e = rep.fitted("flatness/exponent/(" + std::to_string(q) + ")");
      worst = std::max(worst, std::abs(e - (s.p + 1 - q)));
    }
  }
  r.expect(worst <= 0.1, "exponent error " + fmt17(worst));
  r.why << (r.ok ? "" : " | ") << "max exponent error " << worst;
}

// Hausdorff convergence of level sets around the unit circle
void level_sets(Result& r) {
  Scene s = fixture("unit_circle.scene");
  auto run = run_subcommand("levelset", s);
  r.expect(run.convergence && run.convergence->converging, "pipeline table not converging");
  const double pitch = s.grid.box.pitch(s.grid.resolution);
  if (run.convergence) {
    const auto& rows = run.convergence->rows;
    for (std::size_t k = 1; k < rows.size(); ++k)
      r.expect(rows[k].hausdorff <= rows[k - 1].hausdorff, "increase at t = " + fmt17(rows[k].t));
    const double bound = run.fitted["A_fitted"] * rows.back().t + 2 * pitch;
    r.expect(rows.back().hausdorff <= bound, "last row " + fmt17(rows.back().hausdorff));
    r.why << (r.ok ? "" : " | ") << "pipeline last " << rows.back().hausdorff << "; ";
  }
  OraclePtr circle = std::make_shared<SphereOracle>(Point{0.0, 0.0}, 1.0);
  auto exact = hausdorff_convergence(distance_field(circle), circle_samples(4000), s.t_list, s.grid.box,
                                     s.grid.resolution);
  double worst = 0.0;
  for (const auto& row : exact.rows) worst = std::max(worst, std::abs(row.hausdorff - row.t));
  r.expect(worst <= 2 * pitch, "oracle mode error " + fmt17(worst));
  r.why << "oracle max |d_H - t| " << worst << " (pitch " << pitch << ")";
}

void lambda(Result& r) {
  const Box box{{-1.6, -1.6}, {1.6, 1.6}};
  double lo = 1e9, hi = 0.0;
  for (const auto& w : {std::vector<Point>{{0.0, 0.0}}, circle_samples(4000)})
    for (double eps : {0.2, 0.1, 0.05}) {
      const double ratio = lambda_eps(w, eps, box, 161) / eps;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  r.expect(lo >= 0.8 && hi <= 1.2, "ratio out of range");
  r.why << (r.ok ? "" : " | ") << "lambda/eps in [" << lo << ", " << hi << "]";
}

void negatives(Result& r) {
  Scene s = fixture("two_ray.scene");
  auto ctx = validated(s);
  auto c = schedule_constants(ctx, 1.0, s.kappa);
  c.eta[1] = 1.5 * c.delta[0];
  c.update_eps();
  CarvedSets z(ctx, c);
  r.expect(coverage_check(z, c, ctx.grid).verdict() == Outcome::fail, "corrupted schedule accepted");

  GridSpec unit{Box{{0, -1}, {1, 1}}, 101};
  auto root = ScalarField::from_values(
      1, [](std::span<const double> u) { return std::sqrt(u[0]); },
      [](std::span<const double> u) { return std::max(1e-9, 1e-3 * u[0]); },
      [](std::span<const double> u) { return u[0] > 0.0; });
  auto cell = Cell::graph(2, Cell::interval(0, 1, unit), {CellFunction::of(root)}, 1.0, {}, unit);
  r.expect(validate_cell(*cell, 1, unit).verdict() == Outcome::fail, "sqrt graph accepted");

  int code = 0;
  try {
    run_subcommand("partition", fixture("gap.scene"));
  } catch (const Error& e) {
    code = exit_code(e.code());
  }
  r.expect(code == exit_code(ErrorCode::coverage_gap), "gap exit code " + std::to_string(code));
  r.why << (r.ok ? "" : " | ") << "gap exit code " << code;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Result&)>>> criteria = {
      {"two-ray approximation", two_ray},
      {"half-line regularized distance", half_line},
      {"partition of unity", partitions},
      {"bump plateau and support", bump},
      {"combinator soundness", combinators},
      {"relative neighbourhoods", neighbourhoods},
      {"zero-set flatness", flatness},
      {"level-set convergence", level_sets},
      {"lambda diagnostic", lambda},
      {"negative cases", negatives},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Result r;
    try {
      criteria[k].second(r);
    } catch (const std::exception& e) {
      r.expect(false, std::string("exception: ") + e.what());
    }
    failed += !r.ok;
    std::printf("[%s] %2zu %s: %s\n", r.ok ? "PASS" : "FAIL", k + 1, criteria[k].first, r.why.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
