#include "regdist/cells.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "regdist/contour.hpp"
#include "regdist/error.hpp"

namespace regdist {

double GridSpec::pitch() const {
  double h = 0.0;
  for (int i = 0; i < box.dim(); ++i) h = std::max(h, box.pitch(resolution, i));
  return h;
}

CellFunction CellFunction::of(Poly p) {
  CellFunction f;
  f.field = p.dim() > 0 ? p.field() : ScalarField{};
  f.poly = std::move(p);
  return f;
}

CellFunction CellFunction::of(ScalarField f) { return CellFunction{std::move(f), std::nullopt}; }

double CellFunction::value(std::span<const double> u) const { return poly ? poly->value(u) : field.value(u); }

Jet CellFunction::eval(std::span<const Jet> u) const { return poly ? poly->eval(u) : field.eval(u); }

double CellBound::value(std::span<const double> u) const {
  if (infinite < 0) return -kInfinity;
  if (infinite > 0) return kInfinity;
  return fn.value(u);
}

const char* cell_kind_name(CellKind k) {
  switch (k) {
    case CellKind::open: return "open";
    case CellKind::graph: return "graph";
    case CellKind::region: return "region";
  }
  return "?";
}

double lip_to_L(double M) {
  if (M < 0.0) throw Error(ErrorCode::negative_lipschitz, "Lipschitz constant must be >= 0");
  return 1.0 / std::sqrt(1.0 + M * M);
}

namespace {

std::vector<int> checked_perm(int n, std::vector<int> perm) {
  if (perm.empty()) {
    perm.resize(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
  }
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < n; ++i)
    if (static_cast<int>(sorted.size()) != n || sorted[static_cast<std::size_t>(i)] != i)
      throw Error(ErrorCode::invalid_argument, "cell permutation is not a permutation of 0..n-1");
  return perm;
}

/// Endpoints (a, b) of an interval cell.
std::pair<double, double> interval_ends(const Cell& c) {
  if (c.kind() != CellKind::open || c.ambient_dim() != 1)
    throw Error(ErrorCode::unsupported_dimension, "planar cells need an interval base");
  return {c.lower().value({}), c.upper().value({})};
}

/// d(x, C̄) for an open set: 0 inside, distance to the boundary outside.
class ClosureOracle final : public DistanceOracle {
 public:
  ClosureOracle(int n, std::function<bool(std::span<const double>)> inside, OraclePtr boundary)
      : n_(n), inside_(std::move(inside)), boundary_(std::move(boundary)) {}
  int dim() const override { return n_; }
  double distance(std::span<const double> x) const override { return inside_(x) ? 0.0 : boundary_->distance(x); }
  double covering_radius() const override { return boundary_->covering_radius(); }
  std::vector<Point> sample(double spacing, const Box& box) const override { return boundary_->sample(spacing, box); }
  std::string describe() const override { return "closure(" + boundary_->describe() + ")"; }

 private:
  int n_;
  std::function<bool(std::span<const double>)> inside_;
  OraclePtr boundary_;
};

struct Framing {
  int n;
  std::vector<int> perm;
  Point global(const Point& local) const {
    Point x(local.size());
    for (std::size_t k = 0; k < local.size(); ++k) x[static_cast<std::size_t>(perm[k])] = local[k];
    return x;
  }
  std::pair<double, double> range(const Box& box, int k) const {
    auto a = static_cast<std::size_t>(perm[static_cast<std::size_t>(k)]);
    return {box.lo[a], box.hi[a]};
  }
};

/// Curve s ↦ (s, c0 + c1·s) in local coordinates for s ∈ [s0, s1].
OraclePtr affine_curve(const Framing& fr, double s0, double s1, const std::vector<double>& c0, const std::vector<double>& c1) {
  Point o(1, 0.0), d(1, 1.0);
  o.insert(o.end(), c0.begin(), c0.end());
  d.insert(d.end(), c1.begin(), c1.end());
  const double len = norm2(d);
  return std::make_shared<LinearPieceOracle>(fr.global(o), fr.global(d), s0 * len, s1 * len);
}

/// Sampled curve s ↦ local(s) over the box range of local coordinate 0, padded.
OraclePtr sampled_curve(const Framing& fr, double s0, double s1, const std::function<Point(double)>& local,
                        const GridSpec& sampling) {
  auto [lo, hi] = fr.range(sampling.box, 0);
  const double pad = 0.1 * (hi - lo);
  const double a = std::max(s0, lo - pad), b = std::min(s1, hi + pad);
  if (!(a < b)) return std::make_shared<EmptyOracle>(fr.n);
  const int count = std::max(64, 8 * sampling.resolution);
  std::vector<Point> pts;
  double gap = 0.0;
  for (int k = 0; k <= count; ++k) {
    // keep open ends off the endpoints where the map may be undefined
    double s = a + (b - a) * k / count;
    if (k == 0 && s == s0) s += 1e-12 * (1.0 + std::abs(s));
    if (k == count && s == s1) s -= 1e-12 * (1.0 + std::abs(s));
    pts.push_back(fr.global(local(s)));
    if (k > 0) gap = std::max(gap, dist(pts[pts.size() - 1], pts[pts.size() - 2]));
  }
  return std::make_shared<PointCloudOracle>(std::move(pts), 0.5 * gap);
}

Point endpoint(const std::function<Point(double)>& local, double s, double inward) {
  try {
    return local(s);
  } catch (const Error&) {
    return local(s + inward);
  }
}

}  // namespace

int Cell::base_dim() const {
  switch (kind_) {
    case CellKind::graph: return m_;
    case CellKind::open: return n_ - 1;
    case CellKind::region: return n_;
  }
  return 0;
}

std::shared_ptr<const Cell> Cell::open(int n, std::shared_ptr<const Cell> base, CellBound lower, CellBound upper,
                                       double lipschitz_M, std::vector<int> perm, const GridSpec& sampling) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "open cell needs n >= 1");
  if (n == 1 && base) throw Error(ErrorCode::invalid_argument, "a cell in R has no base");
  if (n >= 2 && (!base || base->ambient_dim() != n - 1 || base->dim() != n - 1))
    throw Error(ErrorCode::invalid_argument, "open cell base must be an open cell in R^{n-1}");
  if (lower.infinite > 0 || upper.infinite < 0) throw Error(ErrorCode::invalid_argument, "bounds of an open cell are reversed");
  std::shared_ptr<Cell> c(new Cell());
  c->n_ = n;
  c->m_ = n;
  c->kind_ = CellKind::open;
  c->perm_ = checked_perm(n, std::move(perm));
  c->lipschitz_M_ = lipschitz_M;
  c->L_ = lip_to_L(lipschitz_M);
  c->base_ = std::move(base);
  c->lower_ = std::move(lower);
  c->upper_ = std::move(upper);
  c->build_oracles(sampling);
  return c;
}

std::shared_ptr<const Cell> Cell::graph(int n, std::shared_ptr<const Cell> base, std::vector<CellFunction> phi,
                                        double lipschitz_M, std::vector<int> perm, const GridSpec& sampling) {
  const int m = base ? base->ambient_dim() : 0;
  if (base && base->dim() != m) throw Error(ErrorCode::invalid_argument, "graph base must be open");
  if (m >= n) throw Error(ErrorCode::invalid_argument, "graph cell needs m < n");
  if (static_cast<int>(phi.size()) != n - m) throw Error(ErrorCode::invalid_argument, "graph map needs n - m components");
  std::shared_ptr<Cell> c(new Cell());
  c->n_ = n;
  c->m_ = m;
  c->kind_ = CellKind::graph;
  c->perm_ = checked_perm(n, std::move(perm));
  c->lipschitz_M_ = lipschitz_M;
  c->L_ = lip_to_L(lipschitz_M);
  c->base_ = std::move(base);
  c->phi_ = std::move(phi);
  c->build_oracles(sampling);
  return c;
}

std::shared_ptr<const Cell> Cell::region(int n, std::vector<Poly> positive, const GridSpec& sampling) {
  if (positive.empty()) throw Error(ErrorCode::invalid_argument, "region cell needs at least one polynomial");
  for (const auto& q : positive)
    if (q.dim() != n) throw Error(ErrorCode::invalid_argument, "region polynomial dimension mismatch");
  std::shared_ptr<Cell> c(new Cell());
  c->n_ = n;
  c->m_ = n;
  c->kind_ = CellKind::region;
  c->perm_ = checked_perm(n, {});
  c->positive_ = std::move(positive);
  c->build_oracles(sampling);
  return c;
}

std::shared_ptr<const Cell> Cell::interval(double a, double b, const GridSpec& sampling) {
  auto lo = std::isfinite(a) ? CellBound::of(CellFunction::of(Poly::constant(0, a))) : CellBound::minus_infinity();
  auto hi = std::isfinite(b) ? CellBound::of(CellFunction::of(Poly::constant(0, b))) : CellBound::plus_infinity();
  GridSpec line = sampling;
  if (line.box.dim() != 1) line.box = Box{{sampling.box.lo[0]}, {sampling.box.hi[0]}};
  return open(1, nullptr, lo, hi, 0.0, {}, line);
}

Point Cell::to_local(std::span<const double> x) const {
  Point y(x.size());
  for (std::size_t k = 0; k < perm_.size(); ++k) y[k] = x[static_cast<std::size_t>(perm_[k])];
  return y;
}

Point Cell::to_global(std::span<const double> y) const {
  Point x(y.size());
  for (std::size_t k = 0; k < perm_.size(); ++k) x[static_cast<std::size_t>(perm_[k])] = y[k];
  return x;
}

bool Cell::base_contains(std::span<const double> u) const { return !base_ || base_->contains(u); }

double Cell::base_boundary_distance(std::span<const double> u) const {
  return base_ ? base_->boundary()->distance(u) : kInfinity;
}

bool Cell::contains(std::span<const double> x, double tol) const {
  switch (kind_) {
    case CellKind::open: {
      Point y = to_local(x);
      std::span<const double> u(y.data(), y.size() - 1);
      if (!base_contains(u)) return false;
      const double t = y.back();
      return lower_.value(u) - tol < t && t < upper_.value(u) + tol;
    }
    case CellKind::graph: {
      Point y = to_local(x);
      std::span<const double> u(y.data(), static_cast<std::size_t>(m_));
      if (!base_contains(u)) return false;
      for (std::size_t j = 0; j < phi_.size(); ++j)
        if (std::abs(y[static_cast<std::size_t>(m_) + j] - phi_[j].value(u)) > tol) return false;
      return true;
    }
    case CellKind::region:
      return std::all_of(positive_.begin(), positive_.end(), [&](const Poly& q) { return q.value(x) > -tol; });
  }
  return false;
}

bool Cell::in_slab(std::span<const double> x) const {
  Point y = to_local(x);
  return base_contains(std::span<const double>(y.data(), static_cast<std::size_t>(m_)));
}

Point Cell::graph_point(std::span<const double> x) const {
  Point y = to_local(x);
  std::span<const double> u(y.data(), static_cast<std::size_t>(m_));
  for (std::size_t j = 0; j < phi_.size(); ++j) y[static_cast<std::size_t>(m_) + j] = phi_[j].value(u);
  return to_global(y);
}

std::vector<Jet> Cell::graph_offset(std::span<const Jet> x) const {
  std::vector<Jet> y;
  for (int k : perm_) y.push_back(x[static_cast<std::size_t>(k)]);
  std::span<const Jet> u(y.data(), static_cast<std::size_t>(m_));
  std::vector<Jet> out;
  for (std::size_t j = 0; j < phi_.size(); ++j) {
    Jet w = m_ == 0 ? Jet(x[0].layout(), phi_[j].value({})) : phi_[j].eval(u);
    out.push_back(y[static_cast<std::size_t>(m_) + j] - w);
  }
  return out;
}

std::vector<Jet> Cell::graph_point_jet(std::span<const Jet> x) const {
  std::vector<Jet> y;
  for (int k : perm_) y.push_back(x[static_cast<std::size_t>(k)]);
  std::span<const Jet> u(y.data(), static_cast<std::size_t>(m_));
  std::vector<Jet> w;
  for (std::size_t j = 0; j < phi_.size(); ++j)
    w.push_back(m_ == 0 ? Jet(x[0].layout(), phi_[j].value({})) : phi_[j].eval(u));
  for (std::size_t j = 0; j < w.size(); ++j) y[static_cast<std::size_t>(m_) + j] = w[j];
  std::vector<Jet> g(y.size());
  for (std::size_t k = 0; k < perm_.size(); ++k) g[static_cast<std::size_t>(perm_[k])] = y[k];
  return g;
}

void Cell::build_oracles(const GridSpec& sampling) {
  switch (kind_) {
    case CellKind::open: build_open_boundary(sampling); break;
    case CellKind::graph: build_graph_oracles(sampling); break;
    case CellKind::region: build_region_boundary(sampling); break;
  }
  if (kind_ != CellKind::graph) {
    auto self_lower = lower_, self_upper = upper_;
    auto base = base_;
    auto perm = perm_;
    auto positive = positive_;
    auto kind = kind_;
    // the closure oracle must not own the cell, so it carries copies of the data
    auto inside = [=](std::span<const double> x) {
      if (kind == CellKind::region)
        return std::all_of(positive.begin(), positive.end(), [&](const Poly& q) { return q.value(x) > 0.0; });
      Point y(x.size());
      for (std::size_t k = 0; k < perm.size(); ++k) y[k] = x[static_cast<std::size_t>(perm[k])];
      std::span<const double> u(y.data(), y.size() - 1);
      if (base && !base->contains(u)) return false;
      return self_lower.value(u) < y.back() && y.back() < self_upper.value(u);
    };
    closure_ = std::make_shared<ClosureOracle>(n_, inside, boundary_);
  }
  Box box = sampling.box;
  boundary_samples_ = boundary_->sample(0.5 * sampling.pitch(), box);
}

void Cell::build_open_boundary(const GridSpec& sampling) {
  Framing fr{n_, perm_};
  std::vector<OraclePtr> parts;
  if (n_ == 1) {
    for (const CellBound* b : {&lower_, &upper_})
      if (b->infinite == 0) parts.push_back(LinearPieceOracle::point(Point{b->value({})}));
    boundary_ = make_union(std::move(parts), 1);
    return;
  }
  if (n_ != 2) throw Error(ErrorCode::unsupported_dimension, "open cells are supported for n <= 2");
  auto [a, b] = interval_ends(*base_);
  for (const CellBound* bd : {&lower_, &upper_}) {
    if (bd->infinite) continue;
    if (bd->fn.affine()) {
      auto [c0, grad] = bd->fn.poly->affine_parts();
      parts.push_back(affine_curve(fr, a, b, {c0}, {grad[0]}));
    } else {
      const CellFunction fn = bd->fn;
      parts.push_back(sampled_curve(
          fr, a, b, [fn](double s) { return Point{s, fn.value(Point{s})}; }, sampling));
    }
  }
  // vertical walls over finite base endpoints
  for (double e : {a, b}) {
    if (!std::isfinite(e)) continue;
    const double inward = (e == a ? 1e-12 : -1e-12) * (1.0 + std::abs(e));
    auto at = [&](const CellBound& bd) {
      if (bd.infinite) return bd.value({});
      return endpoint([&](double s) { return Point{s, bd.fn.value(Point{s})}; }, e, inward)[1];
    };
    const double lo = at(lower_), hi = at(upper_);
    if (std::isfinite(lo) && std::isfinite(hi)) {
      parts.push_back(LinearPieceOracle::segment(fr.global({e, lo}), fr.global({e, hi})));
    } else if (std::isfinite(lo)) {
      parts.push_back(LinearPieceOracle::ray(fr.global({e, lo}), fr.global({0.0, 1.0})));
    } else if (std::isfinite(hi)) {
      parts.push_back(LinearPieceOracle::ray(fr.global({e, hi}), fr.global({0.0, -1.0})));
    } else {
      parts.push_back(LinearPieceOracle::line(fr.global({e, 0.0}), fr.global({0.0, 1.0})));
    }
  }
  boundary_ = make_union(std::move(parts), 2);
}

void Cell::build_graph_oracles(const GridSpec& sampling) {
  Framing fr{n_, perm_};
  if (m_ == 0) {
    Point y;
    for (const auto& f : phi_) y.push_back(f.value({}));
    closure_ = LinearPieceOracle::point(fr.global(y));
    boundary_ = std::make_shared<EmptyOracle>(n_);
    return;
  }
  if (m_ != 1) throw Error(ErrorCode::unsupported_dimension, "graph cells over bases of dimension > 1 are not supported");
  auto [a, b] = interval_ends(*base_);
  const auto phi = phi_;
  auto local = [phi](double s) {
    Point y{s};
    for (const auto& f : phi) y.push_back(f.value(Point{s}));
    return y;
  };
  const bool affine = std::all_of(phi_.begin(), phi_.end(), [](const CellFunction& f) { return f.affine(); });
  if (affine) {
    std::vector<double> c0, c1;
    for (const auto& f : phi_) {
      auto [k, g] = f.poly->affine_parts();
      c0.push_back(k);
      c1.push_back(g[0]);
    }
    closure_ = affine_curve(fr, a, b, c0, c1);
  } else {
    auto curve = sampled_curve(fr, a, b, local, sampling);
    std::vector<OraclePtr> parts{curve};
    for (double e : {a, b})
      if (std::isfinite(e)) parts.push_back(LinearPieceOracle::point(fr.global(endpoint(local, e, (e == a ? 1e-12 : -1e-12)))));
    closure_ = make_union(std::move(parts), n_);
  }
  std::vector<OraclePtr> ends;
  for (double e : {a, b})
    if (std::isfinite(e)) ends.push_back(LinearPieceOracle::point(fr.global(endpoint(local, e, (e == a ? 1e-12 : -1e-12)))));
  boundary_ = make_union(std::move(ends), n_);
}

void Cell::build_region_boundary(const GridSpec& sampling) {
  if (n_ > 2) throw Error(ErrorCode::unsupported_dimension, "region cells are supported for n <= 2");
  const int res = std::max(2 * sampling.resolution, 200);
  std::vector<Point> pts;
  double pitch = 0.0;
  for (std::size_t i = 0; i < positive_.size(); ++i) {
    const Poly& q = positive_[i];
    Contour c = extract_contour([&q](std::span<const double> x) { return q.value(x); }, 0.0, sampling.box, res, 1e-12);
    pitch = std::max(pitch, c.pitch);
    for (auto& p : c.points) {
      bool keep = true;
      for (std::size_t j = 0; j < positive_.size(); ++j)
        if (j != i && positive_[j].value(p) < -1e-9) keep = false;
      if (keep) pts.push_back(std::move(p));
    }
  }
  if (pts.empty()) {
    boundary_ = std::make_shared<EmptyOracle>(n_);
    return;
  }
  // consecutive contour points are at most a lattice diagonal apart
  const double cr = n_ == 1 ? 0.0 : pitch * std::sqrt(2.0) * 0.5;
  boundary_ = std::make_shared<PointCloudOracle>(std::move(pts), cr);
}

std::vector<Point> Cell::samples(const GridSpec& grid) const {
  std::vector<Point> out;
  if (kind_ != CellKind::graph) {
    for (auto& x : grid.lattice())
      if (contains(x)) out.push_back(std::move(x));
    return out;
  }
  if (m_ == 0) {
    Point y;
    for (const auto& f : phi_) y.push_back(f.value({}));
    out.push_back(to_global(y));
    return out;
  }
  auto [a, b] = interval_ends(*base_);
  const auto lo_hi = Framing{n_, perm_}.range(grid.box, 0);
  const double lo = std::max(a, lo_hi.first), hi = std::min(b, lo_hi.second);
  if (!(lo < hi)) return out;
  const int count = std::max(2, static_cast<int>(std::ceil((hi - lo) / (0.5 * grid.pitch()))));
  for (int k = 0; k <= count; ++k) {
    Point u{lo + (hi - lo) * k / count};
    if (!base_contains(u)) continue;
    Point y = u;
    for (const auto& f : phi_) y.push_back(f.value(u));
    Point x = to_global(y);
    if (grid.box.contains(x)) out.push_back(std::move(x));
  }
  return out;
}

std::string Cell::describe() const {
  std::ostringstream os;
  os << cell_kind_name(kind_) << " cell dim " << m_ << " in R^" << n_;
  return os.str();
}

// ---- validation ----------------------------------------------------------------

namespace {

std::vector<Point> base_lattice(const Cell& cell, const GridSpec& grid) {
  const int bd = cell.base_dim();
  Box b;
  for (int k = 0; k < bd; ++k) {
    auto a = static_cast<std::size_t>(cell.perm()[static_cast<std::size_t>(k)]);
    b.lo.push_back(grid.box.lo[a]);
    b.hi.push_back(grid.box.hi[a]);
  }
  std::vector<Point> out;
  for (auto& u : b.lattice(grid.resolution))
    if (cell.base_contains(u)) out.push_back(std::move(u));
  return out;
}

double weighted_ratio(double deriv, double d, int q) {
  const double a = std::abs(deriv);
  if (q == 1) return a;
  if (!std::isfinite(d)) return a > 1e-12 ? kInfinity : 0.0;
  return a * std::pow(d, q - 1);
}

std::string loc(std::span<const double> u) { return point_label(u); }

}  // namespace

CertificateReport validate_cell(const Cell& cell, int p, const GridSpec& grid) {
  CertificateReport rep;
  const std::string stage = "validate_cell";
  std::vector<const CellFunction*> fns;
  if (cell.kind() == CellKind::open) {
    if (cell.lower().infinite == 0) fns.push_back(&cell.lower().fn);
    if (cell.upper().infinite == 0) fns.push_back(&cell.upper().fn);
  } else if (cell.kind() == CellKind::graph) {
    for (const auto& f : cell.phi()) fns.push_back(&f);
  }
  const int bd = cell.base_dim();
  if (bd == 0 || fns.empty() || cell.kind() == CellKind::region) {
    rep.note(stage, "M_hat", 0.0);
    rep.note(stage, "lipschitz_observed", 0.0);
    return rep;
  }
  auto us = base_lattice(cell, grid);
  if (us.empty()) throw Error(ErrorCode::empty_grid, "no grid point in the cell base");

  double M_hat = 0.0;
  const auto alphas = multi_index_enumerate(bd, p);
  for (const auto& u : us) {
    const double d = cell.base_boundary_distance(u);
    for (const CellFunction* f : fns) {
      if (f->field.kind() == DerivativeKind::exact) {
        Jet j = f->eval(Jet::variables(u, p));
        for (const auto& a : alphas)
          if (a.order() >= 1) M_hat = std::max(M_hat, weighted_ratio(j.derivative(a), d, a.order()));
      } else {
        for (const auto& a : alphas)
          if (a.order() >= 1) M_hat = std::max(M_hat, weighted_ratio(f->field.derivative(u, a), d, a.order()));
      }
    }
    if (cell.kind() == CellKind::open && fns.size() == 2)
      rep.record(stage, "bounds_ordered", loc(u), cell.upper().value(u), cell.lower().value(u) + 1e-300);
  }
  rep.require(stage, "lambda_p_finite", "", std::isfinite(M_hat));

  // Lipschitz constant on lattice neighbours and random pairs
  auto image = [&](const Point& u) {
    std::vector<double> v;
    for (const CellFunction* f : fns) v.push_back(f->value(u));
    return v;
  };
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i + 1 < us.size(); ++i) pairs.emplace_back(i, i + 1);
  std::mt19937 rng(grid.seed);
  std::uniform_int_distribution<std::size_t> pick(0, us.size() - 1);
  for (int k = 0; k < 2000; ++k) pairs.emplace_back(pick(rng), pick(rng));
  double lip = 0.0;
  for (auto [i, j] : pairs) {
    const double du = dist(us[i], us[j]);
    if (du <= 0.0) continue;
    auto a = image(us[i]), b = image(us[j]);
    // open-cell bounds are checked one at a time, graph maps as a vector
    double dv = 0.0;
    if (cell.kind() == CellKind::graph) {
      dv = dist(a, b);
    } else {
      for (std::size_t c = 0; c < a.size(); ++c) dv = std::max(dv, std::abs(a[c] - b[c]));
    }
    lip = std::max(lip, dv / du);
    rep.record(stage, "lipschitz", loc(us[i]) + "|" + loc(us[j]), cell.lipschitz_M() * du, dv, 1e-9 * (1.0 + dv));
  }
  rep.note(stage, "M_hat", M_hat);
  rep.note(stage, "lipschitz_observed", lip);
  return rep;
}

CertificateReport cell_distance_envelope_check(const Cell& cell, const DistanceOracle& Z, std::span<const double> x) {
  if (cell.kind() != CellKind::graph) throw Error(ErrorCode::invalid_argument, "envelope check needs a graph cell");
  CertificateReport rep;
  const std::string stage = "distance_envelope";
  const double dz = Z.distance(x), cr = Z.covering_radius();
  const double margin = cr + 1e-12 * (1.0 + dz);
  if (cell.in_slab(x)) {
    const double off = dist(x, cell.graph_point(x));
    rep.record(stage, "lower", loc(x), dz, cell.L() * off, margin);
    rep.record(stage, "upper", loc(x), off, dz, margin);
  } else {
    rep.record(stage, "outside_slab", loc(x), dz, cell.L() * cell.boundary()->distance(x), margin);
  }
  return rep;
}

ComposedMap graph_compose_g(const Cell& cell, const ScalarField& g, int p, const GridSpec& grid) {
  if (cell.kind() != CellKind::graph || cell.dim() == 0)
    throw Error(ErrorCode::invalid_argument, "graph_compose_g needs a graph cell of positive dimension");
  const int m = cell.dim();
  auto phi = cell.phi();
  auto perm = cell.perm();
  auto base = cell.base();
  auto lift = [phi, perm, m](std::span<const Jet> u) {
    std::vector<Jet> y(u.begin(), u.end());
    for (const auto& f : phi) y.push_back(f.eval(u));
    std::vector<Jet> x(y.size());
    for (std::size_t k = 0; k < perm.size(); ++k) x[static_cast<std::size_t>(perm[k])] = y[k];
    (void)m;
    return x;
  };
  ComposedMap out;
  out.field = ScalarField::from_jet(
      m, [g, lift](std::span<const Jet> u) { return g.eval(lift(u)); },
      [base](std::span<const double> u) { return !base || base->contains(u); });

  auto us = base_lattice(cell, grid);
  if (us.empty()) throw Error(ErrorCode::empty_grid, "no grid point in the cell base");
  const auto alphas = multi_index_enumerate(m, p);
  double B = 0.0;
  for (const auto& u : us) {
    const double d = cell.base_boundary_distance(u);
    Jet j = out.field.jet(u, p);
    for (const auto& a : alphas)
      if (a.order() >= 1) B = std::max(B, weighted_ratio(j.derivative(a), d, a.order()));
  }
  out.B = B;
  out.report.require("graph_compose_g", "lambda_p_finite", "", std::isfinite(B));
  out.report.note("graph_compose_g", "B", B);
  return out;
}

ScalarField lift_through_graph(const CellPtr& cell, const ScalarField& g) {
  return ScalarField::exact(
      cell->ambient_dim(), [cell, g](std::span<const Jet> x) { return g.eval(cell->graph_point_jet(x)); },
      [cell, g](std::span<const double> x) { return g.value(cell->graph_point(x)); },
      [cell](std::span<const double> x) { return cell->in_slab(x); });
}

double fit_open_regularity(const Cell& cell, const ScalarField& g, const DistanceOracle& W, int p, const GridSpec& grid,
                           CertificateReport* report) {
  const auto alphas = multi_index_enumerate(cell.ambient_dim(), p);
  double B = 0.0;
  std::size_t used = 0, singular = 0;
  for (const auto& x : grid.lattice()) {
    if (!cell.contains(x) || W.distance(x) <= std::max(grid.collar, W.covering_radius())) continue;
    const double d = cell.boundary()->distance(x);
    if (d <= cell.boundary()->covering_radius()) continue;
    Jet j;
    try {
      j = g.jet(x, p);
    } catch (const Error& e) {
      // g has no Taylor expansion here (e.g. the centre of a circle for d(·, W))
      if (e.code() != ErrorCode::zero_denominator) throw;
      ++singular;
      continue;
    }
    for (const auto& a : alphas)
      if (a.order() >= 1) B = std::max(B, weighted_ratio(j.derivative(a), d, a.order()));
    ++used;
  }
  if (report) {
    report->require("fit_open_regularity", "lambda_p_finite", "", std::isfinite(B));
    report->note("fit_open_regularity", "samples", static_cast<double>(used));
    if (singular) report->note("fit_open_regularity", "g_singular_points", static_cast<double>(singular));
  }
  return B;
}

// ---- stratifications ---------------------------------------------------------------

std::vector<int> Stratification::dims() const {
  std::vector<int> d;
  for (const auto& s : strata) d.push_back(s.cell->dim());
  return d;
}

int Stratification::locate(std::span<const double> x, double tol) const {
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const Cell& c = *strata[i].cell;
    if (c.contains(x, c.kind() == CellKind::graph ? tol : 0.0)) return static_cast<int>(i);
  }
  return -1;
}

namespace {

ValidatedStratification validate_impl(Stratification s, int p, const GridSpec& grid, ScalarField g, double A,
                                      bool g_is_distance) {
  if (s.strata.empty()) throw Error(ErrorCode::empty_stratification, "stratification has no strata");
  if (!s.W) throw Error(ErrorCode::invalid_argument, "stratification without W");
  ValidatedStratification v;
  CertificateReport& rep = v.report;
  const std::string stage = "stratification";

  auto before = s.strata;
  std::stable_sort(s.strata.begin(), s.strata.end(),
                   [](const Stratum& a, const Stratum& b) { return a.cell->dim() < b.cell->dim(); });
  bool reordered = false;
  for (std::size_t i = 0; i < before.size(); ++i) reordered |= before[i].id != s.strata[i].id;
  if (reordered) rep.note(stage, "reordered_by_dimension", 1.0);

  const DistanceOracle& W = *s.W;
  const double off_w = std::max(grid.collar, W.covering_radius());

  // coverage and disjointness
  std::size_t gaps = 0, overlaps = 0, probed = 0;
  for (const auto& x : grid.lattice()) {
    const double dw = W.distance(x);
    if (dw <= off_w) continue;
    ++probed;
    int count = 0;
    for (const auto& st : s.strata) count += st.cell->contains(x, st.cell->kind() == CellKind::graph ? 1e-12 : 0.0);
    if (count == 0 && gaps++ < 20) rep.require(stage, "coverage", loc(x), false);
    if (count > 1 && overlaps++ < 20) rep.require(stage, "disjoint", loc(x), false);
    const double gv = g.value(x);
    rep.record(stage, "g_bounded_by_A_dist", loc(x), A * dw, std::abs(gv), 1e-12 * (1.0 + A * dw));
  }
  if (probed == 0) throw Error(ErrorCode::empty_grid, "no grid point off W");
  rep.require(stage, "coverage", "all", gaps == 0);
  rep.require(stage, "disjoint", "all", overlaps == 0);
  rep.note(stage, "probed_points", static_cast<double>(probed));

  // frontier condition: ∂S \ W is a union of lower-dimensional strata
  v.fits.resize(s.strata.size());
  for (std::size_t i = 0; i < s.strata.size(); ++i) {
    const Cell& c = *s.strata[i].cell;
    const double cr = c.boundary()->covering_radius();
    std::size_t bad = 0;
    for (const auto& b : c.boundary_samples()) {
      if (W.distance(b) <= W.covering_radius() + cr + 1e-7) continue;
      bool found = false;
      for (std::size_t j = 0; j < s.strata.size(); ++j) {
        if (j == i || s.strata[j].cell->dim() >= c.dim()) continue;
        if (s.strata[j].cell->closure()->distance(b) <= cr + 1e-9) {
          found = true;
          auto& bs = v.fits[i].boundary_strata;
          if (std::find(bs.begin(), bs.end(), j) == bs.end()) bs.push_back(j);
        }
      }
      if (!found && bad++ < 20) rep.require(stage, "frontier/" + s.strata[i].id, loc(b), false);
    }
    rep.require(stage, "frontier/" + s.strata[i].id, "all", bad == 0);
  }

  ScalarField dw_field = distance_field(s.W);
  for (std::size_t i = 0; i < s.strata.size(); ++i) {
    const Cell& c = *s.strata[i].cell;
    CertificateReport cr = validate_cell(c, p, grid);
    v.fits[i].M_hat = cr.fitted("validate_cell/M_hat");
    rep.merge(cr);
    if (c.kind() == CellKind::graph) {
      if (c.dim() == 0) continue;
      auto cg = graph_compose_g(c, g, p, grid);
      v.fits[i].B_g = cg.B;
      rep.merge(cg.report);
      v.fits[i].B_w = cg.B;
      if (!g_is_distance) v.fits[i].B_w = graph_compose_g(c, dw_field, p, grid).B;
    } else {
      v.fits[i].B_g = fit_open_regularity(c, g, W, p, grid, &rep);
      v.fits[i].B_w = v.fits[i].B_g;
    }
    rep.note(stage, "B_g/" + s.strata[i].id, v.fits[i].B_g);
  }

  v.s = std::move(s);
  v.grid = grid;
  v.p = p;
  v.g = std::move(g);
  v.A = A;
  return v;
}

}  // namespace

ValidatedStratification validate_stratification(Stratification s, int p, const GridSpec& grid, ScalarField g, double A) {
  return validate_impl(std::move(s), p, grid, std::move(g), A, false);
}

ValidatedStratification validate_stratification(Stratification s, int p, const GridSpec& grid) {
  if (!s.W) throw Error(ErrorCode::invalid_argument, "stratification without W");
  auto g = distance_field(s.W);
  return validate_impl(std::move(s), p, grid, g, 1.0, true);
}

Stratification two_ray_stratification(const GridSpec& grid) {
  Stratification s;
  s.n = 1;
  s.W = LinearPieceOracle::point(Point{0.0});
  s.strata.push_back({"negative", Cell::interval(-kInfinity, 0.0, grid)});
  s.strata.push_back({"positive", Cell::interval(0.0, kInfinity, grid)});
  return s;
}

Stratification point_set_stratification(std::vector<double> points, const GridSpec& grid) {
  if (points.empty()) throw Error(ErrorCode::empty_set, "point set is empty");
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  Stratification s;
  s.n = 1;
  std::vector<OraclePtr> w;
  for (double a : points) w.push_back(LinearPieceOracle::point(Point{a}));
  s.W = make_union(std::move(w), 1);
  double prev = -kInfinity;
  for (std::size_t i = 0; i <= points.size(); ++i) {
    const double next = i < points.size() ? points[i] : kInfinity;
    s.strata.push_back({"interval" + std::to_string(i), Cell::interval(prev, next, grid)});
    prev = next;
  }
  return s;
}

Stratification poly_curve_stratification(const Poly& q, const GridSpec& grid) {
  if (q.dim() != 1) throw Error(ErrorCode::invalid_argument, "curve polynomial must be univariate");
  Stratification s;
  s.n = 2;
  const double span = grid.box.hi[0] - grid.box.lo[0];
  const double a = grid.box.lo[0] - span, b = grid.box.hi[0] + span;
  std::vector<double> mono(static_cast<std::size_t>(q.degree() + 1));
  for (std::size_t k = 0; k < mono.size(); ++k) mono[k] = q.coeffs()[k];  // univariate graded order is by power
  s.W = std::make_shared<PolyGraphOracle>(mono, a, b);
  // Lipschitz constant of q over the padded range
  double M = 0.0;
  auto f = q.field();
  for (int k = 0; k <= 4000; ++k) M = std::max(M, std::abs(f.derivative(Point{a + (b - a) * k / 4000}, MultiIndex({1}))));
  auto base = Cell::interval(a, b, grid);
  auto qf = CellFunction::of(q);
  s.strata.push_back({"above", Cell::open(2, base, CellBound::of(qf), CellBound::plus_infinity(), M, {}, grid)});
  s.strata.push_back({"below", Cell::open(2, base, CellBound::minus_infinity(), CellBound::of(qf), M, {}, grid)});
  return s;
}

Stratification half_line_stratification(const GridSpec& grid) {
  Stratification s;
  s.n = 2;
  s.W = LinearPieceOracle::ray(Point{0.0, 0.0}, Point{-1.0, 0.0});
  auto line = Cell::interval(-kInfinity, kInfinity, grid);
  auto zero = CellFunction::of(Poly(1, {0.0}));
  s.strata.push_back({"axis", Cell::graph(2, Cell::interval(0.0, kInfinity, grid), {zero}, 0.0, {}, grid)});
  s.strata.push_back({"upper", Cell::open(2, line, CellBound::of(zero), CellBound::plus_infinity(), 0.0, {}, grid)});
  s.strata.push_back({"lower", Cell::open(2, line, CellBound::minus_infinity(), CellBound::of(zero), 0.0, {}, grid)});
  return s;
}

Stratification unit_circle_stratification(const GridSpec& grid) {
  Stratification s;
  s.n = 2;
  s.W = std::make_shared<SphereOracle>(Point{0.0, 0.0}, 1.0);
  // graded order (0,0),(0,1),(1,0),(0,2),(1,1),(2,0)
  s.strata.push_back({"inside", Cell::region(2, {Poly(2, {1, 0, 0, -1, 0, -1})}, grid)});
  s.strata.push_back({"outside", Cell::region(2, {Poly(2, {-1, 0, 0, 1, 0, 1})}, grid)});
  return s;
}

}  // namespace regdist
