#include "regdist/apps.hpp"

#include <algorithm>
#include <cmath>

#include "regdist/error.hpp"
#include "regdist/kdtree.hpp"

namespace regdist {

namespace {

std::vector<double> values(std::span<const Jet> x) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i].value();
  return v;
}

void require_plane(int n) {
  if (n < 1 || n > 2) throw Error(ErrorCode::unsupported_dimension, "level sets need n = 1 or 2, got " + std::to_string(n));
}

}  // namespace

ScalarField zero_set_function(const RegularFunction& f, int p) {
  if (!f.cert.W) throw Error(ErrorCode::invalid_argument, "zero_set_function needs the certificate's W");
  const OraclePtr W = f.cert.W;
  const ScalarField F = f.field;
  const int power = p + 1;
  auto on_w = [W](std::span<const double> x) { return W->distance(x) <= W->covering_radius(); };
  auto base = [F](std::span<const double> x) {
    const double v = F.value(x);
    if (!(v > 0.0)) throw Error(ErrorCode::non_positive_f, "f = " + fmt17(v) + " at " + point_label(x));
    return v;
  };
  return ScalarField::exact(
      F.dim(),
      [=](std::span<const Jet> x) {
        const auto p0 = values(x);
        if (on_w(p0)) return Jet(x[0].layout(), 0.0);
        base(p0);
        return pow(F.eval(x), power);
      },
      [=](std::span<const double> x) { return on_w(x) ? 0.0 : std::pow(base(x), power); });
}

std::vector<Point> approach_sequence(const Point& a, const Point& dir, double t_max, double t_min, int count) {
  if (count < 2 || !(t_max > t_min) || !(t_min > 0.0))
    throw Error(ErrorCode::invalid_argument, "approach sequence needs t_max > t_min > 0 and two points");
  std::vector<Point> out;
  const double ratio = std::log(t_min / t_max) / (count - 1);
  for (int k = 0; k < count; ++k) {
    const double t = t_max * std::exp(ratio * k);
    Point x = a;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += t * dir[i];
    out.push_back(std::move(x));
  }
  return out;
}

CertificateReport flatness_check(const ScalarField& h, const DistanceOracle& W, int p,
                                 const std::vector<Point>& approach) {
  CertificateReport r;
  for (const auto& alpha : multi_index_enumerate(h.dim(), p)) {
    std::vector<double> lx, ly;
    for (const auto& x : approach) {
      const double d = W.distance(x);
      if (!(d > W.covering_radius())) continue;
      const double v = std::abs(h.derivative(x, alpha));
      if (v > 0.0) {
        lx.push_back(std::log(d));
        ly.push_back(std::log(v));
      }
    }
    const std::string name = "exponent/" + alpha.str();
    const double want = p + 1 - alpha.order();
    if (lx.size() < 2) {
      // vanishes along the sequence
      r.note("flatness", name, kInfinity);
      r.require("flatness", name, "", true);
      continue;
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      mx += lx[k] / n;
      my += ly[k] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sxx += (lx[k] - mx) * (lx[k] - mx);
      sxy += (lx[k] - mx) * (ly[k] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    r.note("flatness", name, slope);
    r.record("flatness", name, "", slope, want - 0.1);
  }
  return r;
}

LevelSet level_set_extract(const ScalarField& f, double t, const Box& box, int resolution) {
  require_plane(f.dim());
  if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "level must be positive");
  LevelSet ls{t, {}, resolution, 1e-9};
  const ScalarField F = f;
  Contour c = extract_contour([F](std::span<const double> x) { return F.value(x); }, t, box, resolution, ls.tol);
  if (c.points.empty())
    throw Error(ErrorCode::empty_level_set, "no crossing of level " + fmt17(t) + " in the box");
  ls.points = std::move(c.points);
  return ls;
}

ConvergenceTable hausdorff_convergence(const ScalarField& f, const std::vector<Point>& W_samples,
                                       const std::vector<double>& t_list, const Box& box, int resolution, double A) {
  for (std::size_t k = 1; k < t_list.size(); ++k)
    if (!(t_list[k] < t_list[k - 1])) throw Error(ErrorCode::invalid_argument, "levels must decrease strictly");
  if (W_samples.empty()) throw Error(ErrorCode::empty_set, "no W samples");
  ConvergenceTable table;
  for (double t : t_list) {
    LevelSet ls = level_set_extract(f, t, box, resolution);
    table.rows.push_back({t, hausdorff_distance(ls.points, W_samples), resolution, ls.points.size()});
  }
  double pitch = 0.0;
  for (int a = 0; a < f.dim(); ++a) pitch = std::max(pitch, box.pitch(resolution, a));
  bool ok = !table.rows.empty();
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    const auto& prev = table.rows[k - 1];
    const auto& row = table.rows[k];
    const std::string loc = "t=" + fmt17(row.t);
    table.report.record("convergence", "non_increasing", loc, 1.1 * prev.hausdorff, row.hausdorff);
    ok = ok && row.hausdorff <= 1.1 * prev.hausdorff;
    const double change = std::abs(static_cast<double>(row.points) - static_cast<double>(prev.points)) /
                          std::max<double>(1.0, static_cast<double>(prev.points));
    if (change > 0.5) table.warnings.push_back("point count jumps between t=" + fmt17(prev.t) + " and t=" + fmt17(row.t) +
                                               ", possible critical level");
  }
  if (!table.rows.empty()) {
    const auto& last = table.rows.back();
    const double bound = A * last.t + 2.0 * pitch;
    table.report.record("convergence", "last_within_At", "t=" + fmt17(last.t), bound, last.hausdorff);
    ok = ok && last.hausdorff <= bound;
  }
  table.converging = ok;
  table.report.note("convergence", "warnings", static_cast<double>(table.warnings.size()));
  return table;
}

double lambda_eps(const std::vector<Point>& W_samples, double eps, const Box& box, int resolution) {
  if (W_samples.empty()) throw Error(ErrorCode::empty_set, "no W samples");
  require_plane(static_cast<int>(W_samples.front().size()));
  if (!(eps > 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
  auto tree = std::make_shared<KdTree>(W_samples);
  Contour c = extract_contour([tree](std::span<const double> x) { return tree->nearest(x).distance; }, eps, box,
                              resolution);
  if (c.points.empty()) throw Error(ErrorCode::empty_contour, "no contour at level " + fmt17(eps));
  KdTree boundary(c.points);
  double lambda = 0.0;
  for (const auto& a : W_samples) lambda = std::max(lambda, boundary.nearest(a).distance);
  return lambda;
}

}  // namespace regdist
