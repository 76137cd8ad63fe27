#include "regdist/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "regdist/error.hpp"

namespace regdist {

namespace {

ValidatedStratification validated(const Scene& s, bool scaled_g) {
  Stratification st = build_stratification(s);
  if (!scaled_g || s.g_scale == 1.0) return validate_stratification(std::move(st), s.p, s.grid);
  const ScalarField D = distance_field(st.W);
  const double c = s.g_scale;
  ScalarField g = ScalarField::exact(
      s.n, [D, c](std::span<const Jet> x) { return D.eval(x) * c; },
      [D, c](std::span<const double> x) { return c * D.value(x); });
  return validate_stratification(std::move(st), s.p, s.grid, g, std::abs(c));
}

class Emitter {
 public:
  Emitter(const RunOptions& opt, RunReport& r) : dir_(opt.out_dir), r_(r) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }
  template <class F>
  void file(const std::string& name, F&& write) {
    if (dir_.empty()) return;
    const auto path = std::filesystem::path(dir_) / name;
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    write(f);
    r_.files.push_back(path.string());
  }

 private:
  std::string dir_;
  RunReport& r_;
};

std::vector<Point> w_samples(const Scene& s, const DistanceOracle& W) {
  return W.sample(s.grid.pitch() / 4.0, s.grid.box);
}

void merge_notes(RunReport& r, const std::string& prefix, const CertificateReport& rep) {
  for (const auto& [k, v] : rep.notes()) r.fitted[prefix + k] = v;
}

// anchors on W with a direction along which W stays the nearest point
std::vector<std::pair<Point, Point>> approach_anchors(const Scene& s, const DistanceOracle& W, double t_max) {
  std::vector<Point> dirs;
  for (int k = 0; k < s.n; ++k)
    for (double sgn : {1.0, -1.0}) {
      Point e(static_cast<std::size_t>(s.n), 0.0);
      e[static_cast<std::size_t>(k)] = sgn;
      dirs.push_back(e);
    }
  if (s.n == 2)
    for (double a : {1.0, -1.0})
      for (double b : {1.0, -1.0}) dirs.push_back({a / std::sqrt(2.0), b / std::sqrt(2.0)});
  auto samples = w_samples(s, W);
  std::vector<std::pair<Point, Point>> out;
  if (samples.empty()) return out;
  const std::size_t picks = std::min<std::size_t>(3, samples.size());
  for (std::size_t k = 0; k < picks; ++k) {
    const Point& a = samples[k * samples.size() / picks + samples.size() / (2 * picks)];
    for (const auto& e : dirs) {
      bool ok = true;
      for (double t : {t_max, t_max * 1e-2, t_max * 1e-4}) {
        Point x = a;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += t * e[i];
        ok = ok && s.grid.box.contains(x) && std::abs(W.distance(x) - t) <= 1e-9 * t + W.covering_radius();
      }
      if (ok) {
        out.push_back({a, e});
        break;
      }
    }
  }
  return out;
}

void run_validate(const Scene& s, RunReport& r) {
  auto ctx = validated(s, false);
  r.report.merge(ctx.report);
  merge_notes(r, "", ctx.report);
}

void run_partition(const Scene& s, RunReport& r) {
  auto ctx = validated(s, false);
  r.report.merge(ctx.report);
  auto part = partition_of_unity(ctx, s.eta.value_or(0.5), s.p);
  r.report.merge(part.report);
  r.report.merge(partition_check(part, ctx, ctx.grid.lattice()));
  for (std::size_t i = 0; i < part.size(); ++i) r.report.merge(cert_verify(part.omega[i], ctx.grid));
  merge_notes(r, "", part.report);
  if (s.bump_target.empty()) return;
  for (std::size_t i = 0; i < ctx.s.strata.size(); ++i) {
    if (ctx.s.strata[i].id != s.bump_target) continue;
    auto b = bump_stratum(ctx, i, s.eta.value_or(0.5), s.p);
    r.report.merge(b.c.check());
    auto rep = bump_check(b, ctx.s.W, ctx.grid.lattice());
    r.report.merge(rep);
    merge_notes(r, "", rep);
  }
}

void run_approx(const Scene& s, RunReport& r) {
  auto ctx = validated(s, true);
  r.report.merge(ctx.report);
  auto a = approximate(ctx, s.kappa);
  r.report.merge(a.report);
  r.report.merge(cert_verify(a.f, ctx.grid));
  r.schedule = a.schedule;
  merge_notes(r, "", a.report);
}

RegularizedDistance run_regdist(const Scene& s, RunReport& r) {
  auto rd = regularized_distance(build_stratification(s), s.p, s.kappa, s.grid);
  r.report.merge(rd.report);
  r.report.merge(cert_verify(rd.f(), s.grid));
  r.schedule = rd.run.schedule;
  r.fitted["A_claimed"] = rd.A_claimed;
  r.fitted["A_fitted"] = rd.A_fitted;
  r.fitted["B_fitted"] = rd.B_fitted;
  // (1.2) under grid doubling
  for (int level = 1; level <= s.grid.refine; ++level) {
    Scene fine = s;
    fine.grid.resolution = (s.grid.resolution - 1) * (1 << level) + 1;
    auto rf = regularized_distance(build_stratification(fine), s.p, s.kappa, fine.grid);
    const double drift = std::abs(rf.B_fitted - rd.B_fitted) / std::max(rd.B_fitted, 1e-300);
    r.fitted["B_fitted_refine_" + std::to_string(level)] = rf.B_fitted;
    r.report.record("regdist", "B_refinement_drift", "level=" + std::to_string(level), 0.1, drift);
  }
  return rd;
}

void run_zeroset(const Scene& s, RunReport& r) {
  auto rd = run_regdist(s, r);
  auto h = zero_set_function(rd.f(), s.p);
  const auto& W = *rd.run.S.s.W;
  const auto anchors = approach_anchors(s, W, 1e-1);
  if (anchors.empty()) throw Error(ErrorCode::empty_set, "no W point to approach inside the grid box");
  for (const auto& [a, e] : anchors) {
    auto rep = flatness_check(h, W, s.p, approach_sequence(a, e, 1e-1, 1e-6, 21));
    r.report.merge(rep);
    merge_notes(r, "at " + point_label(a) + " ", rep);
  }
}

void run_levelset(const Scene& s, RunReport& r, Emitter& emit, bool svg) {
  if (s.t_list.empty()) throw Error(ErrorCode::semantic_error, "levelset needs params.t");
  auto rd = run_regdist(s, r);
  const auto& W = *rd.run.S.s.W;
  const auto ws = w_samples(s, W);
  std::vector<LevelSet> sets;
  for (std::size_t k = 0; k < s.t_list.size(); ++k) {
    sets.push_back(level_set_extract(rd.f().field, s.t_list[k], s.grid.box, s.grid.resolution));
    emit.file("levelset_" + std::to_string(k) + ".csv", [&](std::ostream& o) { write_points_csv(o, sets.back().points); });
  }
  auto table = hausdorff_convergence(rd.f().field, ws, s.t_list, s.grid.box, s.grid.resolution, rd.A_fitted);
  r.report.merge(table.report);
  r.report.require("convergence", "converging", "", table.converging);
  emit.file("convergence.csv", [&](std::ostream& o) { write_convergence_csv(o, table); });
  if (svg && s.n == 2) emit.file("levelsets.svg", [&](std::ostream& o) { write_svg(o, s.grid.box, ws, sets); });
  r.convergence = std::move(table);
}

void run_lambda(const Scene& s, RunReport& r, Emitter& emit) {
  if (s.eps_list.empty()) throw Error(ErrorCode::semantic_error, "lambda needs params.eps");
  const auto W = build_w(s);
  const auto ws = w_samples(s, *W);
  if (ws.empty()) throw Error(ErrorCode::empty_set, "W has no samples in the grid box");
  std::vector<std::pair<double, double>> rows;
  for (double eps : s.eps_list) {
    const double l = lambda_eps(ws, eps, s.grid.box, s.grid.resolution);
    rows.push_back({eps, l});
    r.fitted["lambda/" + fmt17(eps)] = l;
    r.report.note("lambda", "ratio", l / eps, "eps=" + fmt17(eps));
  }
  emit.file("lambda.csv", [&](std::ostream& o) {
    o << "eps,lambda\n";
    for (const auto& [e, l] : rows) o << fmt17(e) << ',' << fmt17(l) << '\n';
  });
}

}  // namespace

Scene apply_options(Scene s, const RunOptions& opt) {
  if (opt.p) s.p = *opt.p;
  if (opt.kappa) s.kappa = *opt.kappa;
  if (opt.resolution) s.grid.resolution = *opt.resolution;
  if (opt.refine) s.grid.refine = *opt.refine;
  if (opt.seed) s.seed = s.grid.seed = *opt.seed;
  if (s.p < 1) throw Error(ErrorCode::semantic_error, "p must be at least 1");
  if (!(s.kappa > 0.0 && s.kappa < 1.0)) throw Error(ErrorCode::semantic_error, "kappa out of range (0, 1)");
  if (s.grid.resolution < 2) throw Error(ErrorCode::semantic_error, "grid resolution must be at least 2");
  return s;
}

RunReport run_subcommand(const std::string& name, const Scene& scene, const RunOptions& opt) {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), name) == kSubcommands.end())
    throw Error(ErrorCode::invalid_argument, "unknown subcommand '" + name + "'");
  const Scene s = apply_options(scene, opt);
  RunReport r;
  r.subcommand = name;
  Emitter emit(opt, r);
  emit.file("scene.txt", [&](std::ostream& o) { o << dump_scene(s); });

  if (name == "validate") run_validate(s, r);
  else if (name == "partition") run_partition(s, r);
  else if (name == "approx") run_approx(s, r);
  else if (name == "regdist") run_regdist(s, r);
  else if (name == "zeroset") run_zeroset(s, r);
  else if (name == "levelset") run_levelset(s, r, emit, opt.svg);
  else if (name == "lambda") run_lambda(s, r, emit);
  else {
    run_validate(s, r);
    if (!s.t_list.empty()) {
      run_levelset(s, r, emit, opt.svg);
    } else {
      run_regdist(s, r);
    }
    if (!s.eps_list.empty() && s.n == 2) run_lambda(s, r, emit);
  }

  if (r.schedule) emit.file("schedule.csv", [&](std::ostream& o) { write_schedule_csv(o, *r.schedule); });
  emit.file("report.csv", [&](std::ostream& o) { r.report.write_csv(o); });
  emit.file("fitted.csv", [&](std::ostream& o) {
    o << "name,value\n";
    for (const auto& [k, v] : r.fitted) o << k << ',' << fmt17(v) << '\n';
  });
  r.exit_status = r.report.verdict() == Outcome::pass ? 0 : 1;
  return r;
}

void write_schedule_csv(std::ostream& os, const ConstantSchedule& s) {
  os << "name,i,j,value\n";
  os << "kappa,,," << fmt17(s.kappa) << '\n';
  os << "A,,," << fmt17(s.A) << '\n';
  os << "theta,,," << fmt17(s.theta) << '\n';
  os << "eta_final,,," << fmt17(s.eta_final) << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::string idx = std::to_string(i + 1);
    os << "L," << idx << ",," << fmt17(s.L[i]) << '\n';
    os << "open," << idx << ",," << (s.open[i] ? 1 : 0) << '\n';
    os << "delta," << idx << ",," << fmt17(s.delta[i]) << '\n';
    os << "eta," << idx << ",," << fmt17(s.eta[i]) << '\n';
    os << "partition_eta," << idx << ",," << fmt17(s.part_eta[i]) << '\n';
    os << "partition_rho," << idx << ",," << fmt17(s.part_rho[i]) << '\n';
    for (std::size_t j = 0; j <= i; ++j) os << "eps," << idx << ',' << j + 1 << ',' << fmt17(s.eps[i][j]) << '\n';
  }
}

void write_points_csv(std::ostream& os, const std::vector<Point>& pts) {
  const std::size_t n = pts.empty() ? 0 : pts.front().size();
  for (std::size_t k = 0; k < n; ++k) os << (k ? "," : "") << "x" << k;
  os << '\n';
  for (const auto& p : pts) {
    for (std::size_t k = 0; k < p.size(); ++k) os << (k ? "," : "") << fmt17(p[k]);
    os << '\n';
  }
}

void write_convergence_csv(std::ostream& os, const ConvergenceTable& t) {
  os << "t,hausdorff,resolution,points\n";
  for (const auto& r : t.rows)
    os << fmt17(r.t) << ',' << fmt17(r.hausdorff) << ',' << r.resolution << ',' << r.points << '\n';
}

void write_svg(std::ostream& os, const Box& box, const std::vector<Point>& w, const std::vector<LevelSet>& sets) {
  if (box.dim() != 2) throw Error(ErrorCode::unsupported_dimension, "SVG output is 2-D only");
  constexpr double size = 600.0, pad = 50.0;
  const double sx = size / (box.hi[0] - box.lo[0]), sy = size / (box.hi[1] - box.lo[1]);
  auto X = [&](double x) { return pad + (x - box.lo[0]) * sx; };
  auto Y = [&](double y) { return pad + (box.hi[1] - y) * sy; };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * pad << "\" height=\"" << size + 2 * pad
     << "\">\n";
  os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << size << "\" height=\"" << size
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = box.lo[0] + (box.hi[0] - box.lo[0]) * k / 4, fy = box.lo[1] + (box.hi[1] - box.lo[1]) * k / 4;
    os << "<text x=\"" << X(fx) << "\" y=\"" << size + 1.6 * pad << "\" font-size=\"12\" text-anchor=\"middle\">"
       << fmt17(fx) << "</text>\n";
    os << "<text x=\"" << pad * 0.9 << "\" y=\"" << Y(fy) << "\" font-size=\"12\" text-anchor=\"end\">" << fmt17(fy)
       << "</text>\n";
  }
  os << "<g fill=\"black\">\n";
  for (const auto& p : w) os << "<circle cx=\"" << X(p[0]) << "\" cy=\"" << Y(p[1]) << "\" r=\"1\"/>\n";
  os << "</g>\n";
  const char* colours[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};
  for (std::size_t k = 0; k < sets.size(); ++k) {
    os << "<g fill=\"" << colours[k % 5] << "\"><title>t = " << fmt17(sets[k].t) << "</title>\n";
    for (const auto& p : sets[k].points)
      os << "<circle cx=\"" << X(p[0]) << "\" cy=\"" << Y(p[1]) << "\" r=\"0.8\"/>\n";
    os << "</g>\n";
  }
  os << "</svg>\n";
}

}  // namespace regdist
