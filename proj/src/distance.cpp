#include "regdist/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "regdist/error.hpp"

namespace regdist {

std::optional<Jet> DistanceOracle::distance_jet(std::span<const Jet>) const { return std::nullopt; }

// ---- linear pieces --------------------------------------------------------

LinearPieceOracle::LinearPieceOracle(Point origin, Point direction, double t0, double t1)
    : o_(std::move(origin)), u_(std::move(direction)), t0_(t0), t1_(t1) {
  if (o_.size() != u_.size()) throw Error(ErrorCode::invalid_argument, "linear piece dimension mismatch");
  if (t1_ < t0_) throw Error(ErrorCode::invalid_argument, "linear piece with t1 < t0");
  double n = norm2(u_);
  if (n == 0.0) {
    if (t0_ != t1_) throw Error(ErrorCode::invalid_argument, "zero direction");
    u_.assign(o_.size(), 0.0);
    u_[0] = 1.0;
    n = 1.0;
  }
  for (double& v : u_) v /= n;
}

std::shared_ptr<LinearPieceOracle> LinearPieceOracle::point(Point p) {
  Point u(p.size(), 0.0);
  u[0] = 1.0;
  return std::make_shared<LinearPieceOracle>(std::move(p), std::move(u), 0.0, 0.0);
}

std::shared_ptr<LinearPieceOracle> LinearPieceOracle::segment(Point a, Point b) {
  Point u(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) u[i] = b[i] - a[i];
  double len = norm2(u);
  if (len == 0.0) return point(std::move(a));
  return std::make_shared<LinearPieceOracle>(std::move(a), std::move(u), 0.0, len);
}

std::shared_ptr<LinearPieceOracle> LinearPieceOracle::ray(Point origin, Point direction) {
  return std::make_shared<LinearPieceOracle>(std::move(origin), std::move(direction), 0.0, kInfinity);
}

std::shared_ptr<LinearPieceOracle> LinearPieceOracle::line(Point origin, Point direction) {
  return std::make_shared<LinearPieceOracle>(std::move(origin), std::move(direction), -kInfinity, kInfinity);
}

double LinearPieceOracle::project(std::span<const double> x) const {
  double t = 0.0;
  for (std::size_t i = 0; i < o_.size(); ++i) t += (x[i] - o_[i]) * u_[i];
  return std::clamp(t, t0_, t1_);
}

double LinearPieceOracle::distance(std::span<const double> x) const {
  const double t = project(x);
  double s = 0.0;
  for (std::size_t i = 0; i < o_.size(); ++i) {
    double d = x[i] - o_[i] - t * u_[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::optional<Jet> LinearPieceOracle::distance_jet(std::span<const Jet> x) const {
  Point xv(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xv[i] = x[i].value();
  const double t = project(xv);
  std::vector<Jet> r;
  r.reserve(x.size());
  if (t > t0_ && t < t1_) {
    // interior: the foot point moves with x
    Jet tj = (x[0] - o_[0]) * u_[0];
    for (std::size_t i = 1; i < x.size(); ++i) tj += (x[i] - o_[i]) * u_[i];
    for (std::size_t i = 0; i < x.size(); ++i) r.push_back(x[i] - o_[i] - tj * u_[i]);
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) r.push_back(x[i] - (o_[i] + t * u_[i]));
  }
  return norm(r);
}

std::vector<Point> LinearPieceOracle::sample(double spacing, const Box& box) const {
  double lo = t0_, hi = t1_;
  for (std::size_t i = 0; i < o_.size(); ++i) {
    if (u_[i] == 0.0 || t0_ == t1_) {
      if (o_[i] < box.lo[i] || o_[i] > box.hi[i]) {
        if (t0_ == t1_ || u_[i] == 0.0) return {};
      }
      continue;
    }
    double a = (box.lo[i] - o_[i]) / u_[i], b = (box.hi[i] - o_[i]) / u_[i];
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
  std::vector<Point> out;
  if (t0_ == t1_) {
    out.push_back(o_);
    return out;
  }
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) return out;
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / spacing)));
  for (int k = 0; k <= n; ++k) {
    const double t = lo + (hi - lo) * k / n;
    Point p(o_.size());
    for (std::size_t i = 0; i < o_.size(); ++i) p[i] = o_[i] + t * u_[i];
    out.push_back(std::move(p));
  }
  return out;
}

std::string LinearPieceOracle::describe() const {
  std::ostringstream os;
  os << "linear[" << t0_ << "," << t1_ << "]";
  return os.str();
}

// ---- spheres ---------------------------------------------------------------

SphereOracle::SphereOracle(Point center, double radius) : c_(std::move(center)), r_(radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "sphere radius must be positive");
}

double SphereOracle::distance(std::span<const double> x) const { return std::abs(dist(x, c_) - r_); }

std::optional<Jet> SphereOracle::distance_jet(std::span<const Jet> x) const {
  std::vector<Jet> r;
  for (std::size_t i = 0; i < x.size(); ++i) r.push_back(x[i] - c_[i]);
  Jet s = norm(r) - r_;
  return s.value() >= 0.0 ? s : -s;
}

std::vector<Point> SphereOracle::sample(double spacing, const Box& box) const {
  if (c_.size() == 1) {
    std::vector<Point> out;
    for (double s : {-1.0, 1.0})
      if (Point p{c_[0] + s * r_}; box.contains(p)) out.push_back(p);
    return out;
  }
  if (c_.size() != 2) throw Error(ErrorCode::unsupported_dimension, "sphere sampling only in the plane");
  const int n = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r_ / spacing)));
  std::vector<Point> out;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    Point p{c_[0] + r_ * std::cos(a), c_[1] + r_ * std::sin(a)};
    if (box.contains(p)) out.push_back(std::move(p));
  }
  return out;
}

std::string SphereOracle::describe() const {
  std::ostringstream os;
  os << "sphere(r=" << r_ << ")";
  return os.str();
}

// ---- polynomial graphs -----------------------------------------------------

PolyGraphOracle::PolyGraphOracle(std::vector<double> coeffs, double a, double b) : c_(std::move(coeffs)), a_(a), b_(b) {
  if (c_.empty()) c_.push_back(0.0);
  if (!(a < b)) throw Error(ErrorCode::invalid_argument, "polygraph interval must satisfy a < b");
}

double PolyGraphOracle::q(double s) const {
  double v = 0.0;
  for (std::size_t k = c_.size(); k-- > 0;) v = v * s + c_[k];
  return v;
}

double PolyGraphOracle::dq(double s) const {
  double v = 0.0;
  for (std::size_t k = c_.size(); k-- > 1;) v = v * s + static_cast<double>(k) * c_[k];
  return v;
}

double PolyGraphOracle::ddq(double s) const {
  double v = 0.0;
  for (std::size_t k = c_.size(); k-- > 2;) v = v * s + static_cast<double>(k * (k - 1)) * c_[k];
  return v;
}

double PolyGraphOracle::distance(std::span<const double> x) const {
  auto f2 = [&](double s) { return (s - x[0]) * (s - x[0]) + (q(s) - x[1]) * (q(s) - x[1]); };
  const double s0 = std::clamp(x[0], a_, b_);
  const double d0 = std::sqrt(f2(s0));
  // every minimiser lies within d0 of x[0] horizontally
  const double lo = std::max(a_, x[0] - d0), hi = std::min(b_, x[0] + d0);
  double best_s = s0, best = f2(s0);
  for (double e : {lo, hi})
    if (f2(e) < best) best = f2(e), best_s = e;
  if (hi > lo) {
    constexpr int kSamples = 256;
    const double h = (hi - lo) / kSamples;
    for (int k = 0; k <= kSamples; ++k) {
      double s = lo + h * k;
      // Newton on F'(s)/2 = (s − x) + (q − y) q'
      for (int it = 0; it < 30; ++it) {
        double g = (s - x[0]) + (q(s) - x[1]) * dq(s);
        double gp = 1.0 + dq(s) * dq(s) + (q(s) - x[1]) * ddq(s);
        if (gp <= 0.0) break;
        double next = std::clamp(s - g / gp, std::max(lo, s - h), std::min(hi, s + h));
        if (std::abs(next - s) < 1e-15 * (1.0 + std::abs(s))) {
          s = next;
          break;
        }
        s = next;
      }
      if (double v = f2(s); v < best) best = v, best_s = s;
    }
  }
  (void)best_s;
  return std::sqrt(best);
}

std::vector<Point> PolyGraphOracle::sample(double spacing, const Box& box) const {
  const double lo = std::max(a_, box.lo[0]), hi = std::min(b_, box.hi[0]);
  std::vector<Point> out;
  if (!(lo <= hi)) return out;
  // arc-length aware step
  double s = lo;
  while (true) {
    Point p{s, q(s)};
    if (box.contains(p)) out.push_back(p);
    if (s >= hi) break;
    s = std::min(hi, s + spacing / std::sqrt(1.0 + dq(s) * dq(s)));
  }
  return out;
}

std::string PolyGraphOracle::describe() const { return "polygraph"; }

// ---- clouds ----------------------------------------------------------------

PointCloudOracle::PointCloudOracle(std::vector<Point> points, double covering_radius)
    : dim_(points.empty() ? 0 : static_cast<int>(points[0].size())), points_(std::move(points)), cr_(covering_radius), tree_(points_) {
  if (covering_radius < 0.0) throw Error(ErrorCode::invalid_argument, "negative covering radius");
}

std::vector<Point> PointCloudOracle::sample(double, const Box& box) const {
  std::vector<Point> out;
  for (const auto& p : points_)
    if (box.contains(p)) out.push_back(p);
  return out;
}

std::string PointCloudOracle::describe() const {
  std::ostringstream os;
  os << "cloud(" << points_.size() << ", cr=" << cr_ << ")";
  return os.str();
}

// ---- unions ----------------------------------------------------------------

UnionOracle::UnionOracle(std::vector<OraclePtr> parts, int dim) : parts_(std::move(parts)), dim_(dim) {}

double UnionOracle::distance(std::span<const double> x) const {
  double d = kInfinity;
  for (const auto& p : parts_) d = std::min(d, p->distance(x));
  return d;
}

double UnionOracle::covering_radius() const {
  double r = 0.0;
  for (const auto& p : parts_) r = std::max(r, p->covering_radius());
  return r;
}

bool UnionOracle::empty() const {
  return std::all_of(parts_.begin(), parts_.end(), [](const OraclePtr& p) { return p->empty(); });
}

bool UnionOracle::has_jets() const {
  return std::all_of(parts_.begin(), parts_.end(), [](const OraclePtr& p) { return p->empty() || p->has_jets(); });
}

std::optional<Jet> UnionOracle::distance_jet(std::span<const Jet> x) const {
  Point xv(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xv[i] = x[i].value();
  const DistanceOracle* best = nullptr;
  double bd = kInfinity;
  for (const auto& p : parts_) {
    double d = p->distance(xv);
    if (d < bd) bd = d, best = p.get();
  }
  if (!best) return std::nullopt;
  return best->distance_jet(x);
}

std::vector<Point> UnionOracle::sample(double spacing, const Box& box) const {
  std::vector<Point> out;
  for (const auto& p : parts_) {
    auto s = p->sample(spacing, box);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

std::string UnionOracle::describe() const {
  std::string s = "union(";
  for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "," : "") + parts_[i]->describe();
  return s + ")";
}

OraclePtr make_union(std::vector<OraclePtr> parts, int dim) {
  std::erase_if(parts, [](const OraclePtr& p) { return !p || p->empty(); });
  if (parts.empty()) return std::make_shared<EmptyOracle>(dim);
  if (parts.size() == 1) return parts[0];
  return std::make_shared<UnionOracle>(std::move(parts), dim);
}

ScalarField distance_field(const OraclePtr& oracle) {
  if (oracle->has_jets()) {
    return ScalarField::exact(
        oracle->dim(),
        [oracle](std::span<const Jet> x) {
          auto j = oracle->distance_jet(x);
          if (!j) throw Error(ErrorCode::invalid_argument, "distance jet unavailable");
          return *j;
        },
        [oracle](std::span<const double> x) { return oracle->distance(x); });
  }
  return ScalarField::from_values(
      oracle->dim(), [oracle](std::span<const double> x) { return oracle->distance(x); },
      [oracle](std::span<const double> x) { return fd_step_for_distance(oracle->distance(x)); });
}

// ---- G_η -------------------------------------------------------------------

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::in: return "in";
    case Verdict::out: return "out";
    case Verdict::ambiguous: return "ambiguous";
  }
  return "?";
}

Verdict g_eta_verdict(double dz, double cr_z, double dw, double cr_w, double eta) {
  if (!(eta > 0.0)) throw Error(ErrorCode::invalid_argument, "eta must be positive");
  if (dw <= cr_w) throw Error(ErrorCode::on_target_set, "point lies on W up to the oracle error");
  if (!std::isfinite(dz)) return Verdict::out;
  if (dz + cr_z < eta * (dw - cr_w)) return Verdict::in;
  if (dz - cr_z >= eta * (dw + cr_w)) return Verdict::out;
  return Verdict::ambiguous;
}

Verdict g_eta_contains(const DistanceOracle& Z, const DistanceOracle& W, double eta, std::span<const double> x) {
  const double dw = W.distance(x);
  if (dw <= W.covering_radius()) throw Error(ErrorCode::on_target_set, "point lies on W up to the oracle error");
  return g_eta_verdict(Z.distance(x), Z.covering_radius(), dw, W.covering_radius(), eta);
}

double g_eta_compose_bound(double eps, double eta) { return eps + eta + eps * eta; }

double directed_hausdorff(const std::vector<Point>& a, const KdTree& b) {
  double h = 0.0;
  for (const auto& x : a) h = std::max(h, b.nearest(x).distance);
  return h;
}

double hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::empty_set, "hausdorff_distance of an empty set");
  KdTree ta(a), tb(b);
  return std::max(directed_hausdorff(a, tb), directed_hausdorff(b, ta));
}

}  // namespace regdist
