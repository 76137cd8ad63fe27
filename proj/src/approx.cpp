#include "regdist/approx.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "regdist/error.hpp"

namespace regdist {

namespace {

constexpr double kMargin = 0.9;
// graph strata: η_i ≤ ρ_i / kPlateauShare keeps later supports off the carved parts
constexpr double kPlateauShare = 16.0;
constexpr int kWitnessSteps = 40;

void positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::infeasible_schedule, what + " = " + fmt17(v));
}

bool is_graph(const CellPtr& c) { return c->kind() == CellKind::graph; }

Point lift(const Cell& cell, std::span<const double> u) {
  Point y(static_cast<std::size_t>(cell.ambient_dim()), 0.0);
  std::copy(u.begin(), u.end(), y.begin());
  return cell.graph_point(cell.to_global(y));
}

Point base_coords(const Cell& cell, std::span<const double> x) {
  Point y = cell.to_local(x);
  y.resize(static_cast<std::size_t>(cell.dim()));
  return y;
}

double norm2(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

bool jet_is_zero(const Jet& j) {
  for (std::size_t k = 0; k < j.size(); ++k)
    if (j.coeff(k) != 0.0) return false;
  return true;
}

double skip_radius(const ValidatedStratification& S) {
  return std::max(S.grid.collar, S.s.W->covering_radius());
}

}  // namespace

void ConstantSchedule::update_eps() {
  const std::size_t s = size();
  eps.assign(s, {});
  for (std::size_t i = 0; i < s; ++i) {
    eps[i].assign(i + 1, 0.0);
    eps[i][i] = eta[i];
    for (std::size_t j = 0; j < i; ++j) eps[i][j] = eps[i - 1][j] + eta[i] + eta[i] * eps[i - 1][j];
  }
}

CertificateReport ConstantSchedule::check(const std::string& stage) const {
  CertificateReport r;
  r.require(stage, "theta_in_unit", "", theta > 0.0 && theta < 1.0);
  for (std::size_t i = 0; i < size(); ++i) {
    const std::string loc = std::to_string(i);
    r.require(stage, "A_theta_over_L_below_kappa", loc, A * theta / L[i] < kappa);
    r.require(stage, "eta_below_delta", loc, eta[i] > 0.0 && eta[i] < delta[i]);
    r.require(stage, "delta_below_previous", loc, i == 0 ? delta[0] < theta : delta[i] < eta[i - 1]);
    if (i > 0 && !open[i]) {
      const double den = eta[i - 1] - delta[i] * (eta[i - 1] + 1.0);
      r.require(stage, "slab_condition", loc, den > 0.0 && delta[i] / den < L[i]);
    }
    for (std::size_t j = 0; j <= i; ++j)
      r.require(stage, "eps_below_delta", loc + "," + std::to_string(j), eps[i][j] > 0.0 && eps[i][j] < delta[j]);
  }
  r.require(stage, "final_eta_positive", "", eta_final > 0.0);
  return r;
}

double next_delta(double eta, double L, bool open) {
  double d = eta / (1.0 + eta);
  if (!open) d = std::min(d, L * eta / (1.0 + L * (eta + 1.0)));
  return kMargin * d;
}

ConstantSchedule schedule_constants(const ValidatedStratification& S, double A, double kappa) {
  positive(A, "A");
  positive(kappa, "kappa");
  const auto& strata = S.s.strata;
  const std::size_t s = strata.size();
  if (s == 0) throw Error(ErrorCode::empty_stratification, "no strata");
  ConstantSchedule c;
  c.kappa = kappa;
  c.A = A;
  double Lmin = kInfinity;
  for (const auto& st : strata) {
    c.L.push_back(st.cell->L());
    c.open.push_back(!is_graph(st.cell));
    Lmin = std::min(Lmin, st.cell->L());
  }
  positive(Lmin, "L");
  c.theta = kMargin * std::min(1.0, kappa * Lmin / A);
  positive(c.theta, "theta");

  c.delta.assign(s, 0.0);
  c.eta.assign(s, 0.0);
  c.part_eta.assign(s, 0.0);
  c.part_rho.assign(s, 0.0);

  // tower plateau of stratum i at support scale 0.9·δ_i, as partition_of_unity builds it
  auto plateau_of = [&](std::size_t i) {
    c.part_eta[i] = kMargin * c.delta[i];
    if (c.open[i]) {
      c.part_rho[i] = kMargin * c.part_eta[i];
      return;
    }
    double rho_prime = kMargin * c.part_eta[i] / 2.0;
    for (std::size_t j : S.fits[i].boundary_strata) rho_prime = std::min(rho_prime, c.part_rho[j]);
    c.part_rho[i] = graph_bump_constants(c.L[i], c.part_eta[i], rho_prime).rho;
  };
  auto cap = [&](std::size_t i, double eta) {
    return c.open[i] ? eta : std::min(eta, c.part_rho[i] / kPlateauShare);
  };

  c.delta[0] = kMargin * std::min(c.theta, c.L[0]);
  positive(c.delta[0], "delta_1");
  plateau_of(0);
  c.eta[0] = cap(0, c.delta[0] / 2.0);
  positive(c.eta[0], "eta_1");
  c.eps = {{c.eta[0]}};

  for (std::size_t i = 1; i < s; ++i) {
    c.delta[i] = next_delta(c.eta[i - 1], c.L[i], c.open[i]);
    positive(c.delta[i], "delta_" + std::to_string(i + 1));
    plateau_of(i);
    double eta = c.delta[i];
    for (std::size_t j = 0; j < i; ++j)
      eta = std::min(eta, (c.delta[j] - c.eps[i - 1][j]) / (1.0 + c.eps[i - 1][j]));
    c.eta[i] = cap(i, kMargin * eta);
    positive(c.eta[i], "eta_" + std::to_string(i + 1));
    c.update_eps();
  }
  c.update_eps();

  double fin = kInfinity;
  for (std::size_t j = 0; j < s; ++j) fin = std::min(fin, (c.delta[j] - c.eps[s - 1][j]) / (1.0 + c.eps[s - 1][j]));
  c.eta_final = kMargin * fin;
  positive(c.eta_final, "final eta");
  return c;
}

// ---------------------------------------------------------------------------

struct CarvedSets::Query {
  Point x;
  double dw = 0.0, crw = 0.0;
  std::vector<std::optional<double>> lo, hi;
  std::vector<std::optional<Verdict>> member;

  Query(std::span<const double> p, const DistanceOracle& W, std::size_t s)
      : x(p.begin(), p.end()), dw(W.distance(p)), crw(W.covering_radius()), lo(s), hi(s), member(s) {}
};

CarvedSets::CarvedSets(const ValidatedStratification& S, const ConstantSchedule& sched) : S_(&S), sched_(sched) {
  if (sched.size() != S.s.strata.size()) throw Error(ErrorCode::invalid_argument, "schedule does not match strata");
  for (const auto& st : S.s.strata) cells_.push_back(st.cell);
  samples_.resize(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i)
    for (auto& x : cells_[i]->samples(S.grid)) {
      if (S.s.W->distance(x) <= skip_radius(S)) continue;
      if (member(i, x) != Verdict::out) samples_[i].push_back(std::move(x));
    }
}

double CarvedSets::inner_ratio(std::size_t i, std::size_t j) const {
  double r = sched_.eta[j];
  for (std::size_t k = j + 1; k <= i; ++k) r = sched_.eta[k] + r - sched_.eta[k] * r;
  return r;
}

double CarvedSets::outer_ratio(std::size_t i, std::size_t j) const { return sched_.eps[i][j]; }

DistanceBounds CarvedSets::distance(std::size_t i, std::span<const double> x) const {
  Query q(x, *S_->s.W, size());
  return distance(i, q);
}

Verdict CarvedSets::member(std::size_t i, std::span<const double> x) const {
  Query q(x, *S_->s.W, size());
  return member(i, q);
}

Verdict CarvedSets::nested(std::size_t i, std::size_t j, std::span<const double> x) const {
  Query q(x, *S_->s.W, size());
  return nested(i, j, q);
}

Verdict CarvedSets::member_at(std::size_t i, std::span<const double> y) const { return member(i, y); }

DistanceBounds CarvedSets::distance(std::size_t i, Query& q) const {
  if (!q.lo[i]) {
    const auto& C = *cells_[i]->closure();
    double lo = std::max(0.0, C.distance(q.x) - C.covering_radius());
    // a point z of Z_i lies outside every nested set of lower Z_j, so
    // d(z, Z_j) ≥ r·d(z, W); pull that back to x. Only needed below δ_i·d(x,W).
    if (i > 0 && lo < sched_.delta[i] * q.dw) {
      for (std::size_t j = 0; j < i; ++j) {
        const double r = inner_ratio(i - 1, j);
        const double bound = (r * (q.dw - q.crw) - distance(j, q).hi) / (1.0 + r);
        lo = std::max(lo, bound);
      }
    }
    q.lo[i] = lo;
  }
  if (!q.hi[i]) {
    if (i == 0) {
      const auto& C = *cells_[0]->closure();
      q.hi[0] = C.distance(q.x) + C.covering_radius();
    } else {
      q.hi[i] = member(i, q) == Verdict::in ? 0.0 : witness(i, q.x);
    }
  }
  return {*q.lo[i], *q.hi[i]};
}

Verdict CarvedSets::member(std::size_t i, Query& q) const {
  if (q.member[i]) return *q.member[i];
  Verdict v = Verdict::in;
  if (!cells_[i]->contains(q.x) || q.dw <= q.crw) {
    v = Verdict::out;
  } else {
    for (std::size_t j = 0; j < i; ++j) {
      const Verdict n = nested(i - 1, j, q);
      if (n == Verdict::in) {
        v = Verdict::out;
        break;
      }
      if (n == Verdict::ambiguous) v = Verdict::ambiguous;
    }
  }
  q.member[i] = v;
  return v;
}

Verdict CarvedSets::nested(std::size_t i, std::size_t j, Query& q) const {
  if (q.dw <= q.crw) return Verdict::out;
  // lo first: it is cheap for most points and never needs a witness for j itself
  if (!q.lo[j]) {
    const auto& C = *cells_[j]->closure();
    const double base = std::max(0.0, C.distance(q.x) - C.covering_radius());
    if (base >= outer_ratio(i, j) * (q.dw + q.crw)) return Verdict::out;
  }
  const DistanceBounds b = distance(j, q);
  if (b.lo >= outer_ratio(i, j) * (q.dw + q.crw)) return Verdict::out;
  if (b.hi < inner_ratio(i, j) * (q.dw - q.crw)) return Verdict::in;
  return Verdict::ambiguous;
}

Verdict CarvedSets::in_g(std::size_t i, double eta, std::span<const double> x) const {
  Query q(x, *S_->s.W, size());
  if (q.dw <= q.crw) return Verdict::out;
  const auto& C = *cells_[i]->closure();
  if (C.distance(x) - C.covering_radius() >= eta * (q.dw + q.crw)) return Verdict::out;
  const DistanceBounds b = distance(i, q);
  if (b.lo >= eta * (q.dw + q.crw)) return Verdict::out;
  if (b.hi < eta * (q.dw - q.crw)) return Verdict::in;
  return Verdict::ambiguous;
}

// Upper bound on d(x, Z_i): start on C_i next to x and walk away from the
// lower strata until a point certified in Z_i turns up.
double CarvedSets::witness(std::size_t i, std::span<const double> x) const {
  const Cell& cell = *cells_[i];
  const auto& W = *S_->s.W;
  Point c;
  if (cell.contains(x)) {
    c.assign(x.begin(), x.end());
  } else if (is_graph(cells_[i]) && cell.in_slab(x)) {
    c = cell.graph_point(x);
  } else {
    // step through the nearest part of the closure, along the distance gradient
    const auto& C = *cell.closure();
    const double dz = C.distance(x);
    const double h = 1e-4 * std::max(dz, 1e-9);
    Point grad(x.size());
    double gn = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      Point a(x.begin(), x.end()), b(x.begin(), x.end());
      a[k] += h;
      b[k] -= h;
      grad[k] = (C.distance(a) - C.distance(b)) / (2 * h);
      gn += grad[k] * grad[k];
    }
    gn = std::sqrt(gn);
    if (!(gn > 0.5)) return kInfinity;
    const double push = dz + 0.01 * W.distance(x);
    c.assign(x.begin(), x.end());
    for (std::size_t k = 0; k < x.size(); ++k) c[k] -= push * grad[k] / gn;
    if (is_graph(cells_[i])) {
      if (!cell.in_slab(c)) return kInfinity;
      c = cell.graph_point(c);
    }
    if (!cell.contains(c, 1e-12)) return kInfinity;
  }
  const Point x0(x.begin(), x.end());
  if (i == 0) return norm2(x0, c);
  if (is_graph(cells_[i]) && cell.dim() == 0) return member_at(i, c) == Verdict::in ? norm2(x0, c) : kInfinity;

  // relative distance to the lower strata; larger is deeper inside Z_i
  auto height = [&](const Point& y) {
    const double dw = W.distance(y);
    double h = kInfinity;
    for (std::size_t j = 0; j < i; ++j) h = std::min(h, cells_[j]->closure()->distance(y) / dw);
    return h;
  };
  double widest = 0.0;
  for (std::size_t j = 0; j < i; ++j) widest = std::max(widest, outer_ratio(i - 1, j));
  const bool graph = is_graph(cells_[i]);

  for (int step = 0; step < kWitnessSteps; ++step) {
    const Verdict v = member_at(i, c);
    if (v == Verdict::in) return norm2(x0, c);
    const double dc = W.distance(c);
    if (!(dc > 0.0)) return kInfinity;
    Point v0 = graph ? base_coords(cell, c) : c;
    auto at = [&](const Point& u) { return graph ? lift(cell, u) : u; };
    const double h = 1e-4 * dc;
    Point grad(v0.size());
    double gn = 0.0;
    for (std::size_t k = 0; k < v0.size(); ++k) {
      Point a = v0, b = v0;
      a[k] += h;
      b[k] -= h;
      grad[k] = (height(at(a)) - height(at(b))) / (2 * h);
      gn += grad[k] * grad[k];
    }
    gn = std::sqrt(gn);
    if (!(gn > 0.0) || !std::isfinite(gn)) return kInfinity;
    const double len = 0.25 * widest * dc;
    for (std::size_t k = 0; k < v0.size(); ++k) v0[k] += len * grad[k] / gn;
    if (graph && !cell.base_contains(v0)) return kInfinity;
    c = at(v0);
    if (!cell.contains(c, 1e-12)) return kInfinity;
  }
  return kInfinity;
}

CarvedSets carve_sets(const ValidatedStratification& S, const ConstantSchedule& sched) { return CarvedSets(S, sched); }

CertificateReport coverage_check(const CarvedSets& carved, const ConstantSchedule& sched, const GridSpec& grid) {
  CertificateReport r;
  const auto& S = carved.strata();
  const auto& W = *S.s.W;
  const std::size_t s = carved.size();

  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const std::string loc = std::to_string(i) + "," + std::to_string(j);
      r.record("coverage", "eps_below_delta", loc, sched.delta[j], sched.eps[i][j]);
      r.require("coverage", "eps_strict", loc, sched.eps[i][j] < sched.delta[j]);
    }

  const double skip = std::max(grid.collar, W.covering_radius());
  std::size_t tested = 0, ambiguous = 0;
  for (const auto& x : grid.lattice()) {
    const double dw = W.distance(x);
    if (dw <= skip) continue;
    const std::string loc = point_label(x);
    const double crw = W.covering_radius();
    double dc = kInfinity;
    for (std::size_t i = 0; i < s; ++i) {
      const auto& C = *S.s.strata[i].cell->closure();
      dc = std::min(dc, C.distance(x) + C.covering_radius());
      std::vector<Verdict> nested(i + 1);
      for (std::size_t j = 0; j <= i; ++j) nested[j] = carved.nested(i, j, x);

      // (4.4): d(x, C_1 ∪ … ∪ C_i) < η_i d(x,W) ⇒ x in one of the nested sets
      if (dc < sched.eta[i] * (dw - crw)) {
        ++tested;
        const bool in = std::any_of(nested.begin(), nested.end(), [](Verdict v) { return v == Verdict::in; });
        const bool out = std::all_of(nested.begin(), nested.end(), [](Verdict v) { return v == Verdict::out; });
        if (!in && !out) ++ambiguous;
        r.require("coverage", "nested_union", loc + "/" + std::to_string(i), !out);
      }
      // (4.6): the nested sets stay inside G_{δ_j}(Z_j)
      for (std::size_t j = 0; j <= i; ++j)
        if (nested[j] == Verdict::in)
          r.require("coverage", "nested_in_G_delta", loc + "/" + std::to_string(i) + "," + std::to_string(j),
                    carved.in_g(j, sched.delta[j], x) != Verdict::out);
    }
  }
  r.note("coverage", "tested_points", static_cast<double>(tested));
  r.note("coverage", "undecided_points", static_cast<double>(ambiguous));
  return r;
}

// ---------------------------------------------------------------------------

LocalApprox local_approx(std::size_t i, const CarvedSets& carved, const ConstantSchedule& sched) {
  const auto& S = carved.strata();
  const auto& W = *S.s.W;
  const CellPtr& cell = S.s.strata[i].cell;
  const std::string stage = "local/" + S.s.strata[i].id;
  const bool graph = is_graph(cell);
  const double delta = sched.delta[i], L = sched.L[i], A = sched.A;
  const bool bare = S.fits[i].boundary_strata.empty();

  LocalApprox la;
  la.index = i;
  la.error_factor = graph ? A * delta / L : 0.0;

  // Λ¹ constant of f_i: B·c^{1−q} with c the lower bound of d(u,∂T)/d(x,W)
  // (graph) or d(x,∂C)/d(x,W) (open) on G_{δ_i}(Z_i)
  double c = 1.0;
  if (graph) {
    if (bare || i == 0) {
      c = L - delta;
    } else {
      const double e = sched.eta[i - 1];
      const double den = e - delta * (e + 1.0);
      c = den * (L - delta / den);
    }
  } else if (!bare && i > 0) {
    const double e = sched.eta[i - 1];
    c = e - delta * (1.0 + e);
  }
  if (!(c > 0.0))
    throw Error(ErrorCode::containment_violation, "derivative factor " + fmt17(c) + " of " + S.s.strata[i].id);
  const double B = S.fits[i].B_g;
  std::vector<double> Mq;
  for (int q = 1; q <= S.p; ++q) Mq.push_back(std::max(B, 1e-12) * std::pow(c, 1 - q));

  la.f.field = graph ? lift_through_graph(cell, S.g)
                     : ScalarField::exact(
                           S.s.n, [g = S.g](std::span<const Jet> x) { return g.eval(x); },
                           [g = S.g](std::span<const double> x) { return g.value(x); },
                           [cell](std::span<const double> x) { return cell->contains(x); });
  la.f.domain = graph ? "slab of " + S.s.strata[i].id : S.s.strata[i].id;
  la.f.cert = {S.s.W, 1, S.p, 1e-12, A + la.error_factor, std::nullopt, {}};
  la.f.cert.set_orders(Mq);
  la.report.note(stage, "derivative_factor", c);
  la.report.note(stage, "B", B);

  // samples of G_{δ_i}(Z_i): shifts of certified points of Z_i by less than δ·d(z,W)/(1+δ)
  const int n = S.s.n;
  std::vector<Point> dirs;
  for (int k = 0; k < n; ++k) {
    Point e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(k)] = 1.0;
    dirs.push_back(e);
    e[static_cast<std::size_t>(k)] = -1.0;
    dirs.push_back(e);
  }
  if (n == 2)
    for (double a : {1.0, -1.0})
      for (double b : {1.0, -1.0}) dirs.push_back({a / std::sqrt(2.0), b / std::sqrt(2.0)});

  std::size_t used = 0;
  for (const auto& z : carved.samples(i)) {
    if (carved.member(i, z) != Verdict::in) continue;
    const double dz = W.distance(z);
    const std::string zl = point_label(z);
    // (4.7): certified points of Z_i keep η_{i−1}·d(z,W) away from ∂C_i
    if (i > 0) {
      const auto& dC = *cell->boundary();
      la.report.record(stage, "boundary_distance", zl, dC.distance(z) + dC.covering_radius(),
                       sched.eta[i - 1] * (dz - W.covering_radius()));
    }
    std::vector<Point> shifted{z};
    for (double t : {0.3, 0.6, 0.95})
      for (const auto& e : dirs) {
        Point x = z;
        for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] += t * delta * dz / (1.0 + delta) * e[static_cast<std::size_t>(k)];
        shifted.push_back(std::move(x));
      }
    {
      for (const auto& x : shifted) {
        const bool inside = graph ? cell->in_slab(x) : cell->contains(x);
        if (!inside)
          throw Error(ErrorCode::containment_violation,
                      point_label(x) + " in G_delta(Z) leaves " + (graph ? "the slab of " : "") + S.s.strata[i].id);
        const double dx = W.distance(x);
        if (dx <= skip_radius(S)) continue;
        const double err = std::abs(la.f.field.value(x) - S.g.value(x));
        la.report.record(stage, "error_bound", point_label(x), la.error_factor * dx, err, 1e-12 * dx);
        ++used;
      }
    }
  }
  la.report.note(stage, "samples", static_cast<double>(used));
  return la;
}

RegularFunction assemble(const std::vector<LocalApprox>& locals, const Partition& part, const CarvedSets& carved,
                         CertificateReport* report) {
  if (locals.size() != part.size()) throw Error(ErrorCode::invalid_argument, "one local approximant per stratum");
  const auto& S = carved.strata();
  const auto& sched = carved.schedule();

  RegularFunction f;
  for (std::size_t i = 0; i < locals.size(); ++i) {
    RegularFunction t = cert_product(locals[i].f, part.omega[i]);
    f = i == 0 ? t : cert_sum(f, t);
  }
  std::vector<ScalarField> fs, ws;
  for (std::size_t i = 0; i < locals.size(); ++i) {
    fs.push_back(locals[i].f.field);
    ws.push_back(part.omega[i].field);
  }
  // f_i is only evaluated where ω_i does not vanish
  f.field = ScalarField::exact(
      S.s.n,
      [fs, ws](std::span<const Jet> x) {
        Jet sum(x[0].layout(), 0.0);
        for (std::size_t i = 0; i < fs.size(); ++i) {
          Jet w = ws[i].eval(x);
          if (jet_is_zero(w)) continue;
          sum += fs[i].eval(x) * w;
        }
        return sum;
      },
      [fs, ws](std::span<const double> x) {
        double sum = 0.0;
        for (std::size_t i = 0; i < fs.size(); ++i) {
          const double w = ws[i].value(x);
          if (w != 0.0) sum += fs[i].value(x) * w;
        }
        return sum;
      });
  f.domain = "complement of W";
  f.range.reset();

  CertificateReport r;
  std::size_t checked = 0;
  const double skip = skip_radius(S);
  for (const auto& x : S.grid.lattice()) {
    if (S.s.W->distance(x) <= skip) continue;
    for (std::size_t i = 0; i < part.size(); ++i) {
      if (part.omega[i].field.value(x) <= 0.0) continue;
      ++checked;
      const Verdict v = carved.in_g(i, sched.delta[i], x);
      if (v == Verdict::out)
        throw Error(ErrorCode::support_leak,
                    "omega of " + S.s.strata[i].id + " is positive at " + point_label(x) + " outside G_delta(Z)");
      r.require("assemble", "support_in_G_delta", point_label(x), true);
    }
  }
  r.note("assemble", "support_points", static_cast<double>(checked));
  r.note("assemble", "M", f.cert.M);
  if (report) report->merge(r);
  return f;
}

Approximation approximate(const ValidatedStratification& S, double kappa) {
  // Thm. 1.3 asks for g = 0 on W
  for (const auto& w : S.s.W->sample(S.grid.pitch(), S.grid.box)) {
    const double v = std::abs(S.g.value(w));
    if (v > 1e-9 * (1.0 + S.grid.box.diameter()))
      throw Error(ErrorCode::invalid_argument, "g does not vanish on W at " + point_label(w));
  }
  Approximation a{S, {}, {}, {}, {}, {}};
  a.schedule = schedule_constants(a.S, a.S.A, kappa);
  a.report.merge(a.schedule.check());
  CarvedSets carved(a.S, a.schedule);
  a.report.merge(coverage_check(carved, a.schedule, a.S.grid));
  a.partition = partition_of_unity(a.S, a.schedule.part_eta, a.S.p);
  a.report.merge(a.partition.report);
  for (std::size_t i = 0; i < a.S.s.strata.size(); ++i) {
    a.locals.push_back(local_approx(i, carved, a.schedule));
    a.report.merge(a.locals.back().report);
  }
  a.f = assemble(a.locals, a.partition, carved, &a.report);

  const double skip = skip_radius(a.S);
  for (const auto& x : a.S.grid.lattice()) {
    const double d = a.S.s.W->distance(x);
    if (d <= skip) continue;
    a.report.record("approx", "kappa_bound", point_label(x), kappa * d, std::abs(a.f.field.value(x) - a.S.g.value(x)),
                    1e-12 * d);
  }
  return a;
}

EquivalenceFit fit_equivalence(const RegularFunction& f, const DistanceOracle& W, int p, const std::vector<Point>& pts,
                               double collar) {
  EquivalenceFit fit;
  fit.B_order.assign(static_cast<std::size_t>(p), 0.0);
  const auto alphas = multi_index_enumerate(W.dim(), p);
  for (const auto& x : pts) {
    const double d = W.distance(x);
    if (d <= std::max(collar, W.covering_radius())) continue;
    Jet j;
    try {
      j = f.field.jet(x, p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::zero_denominator) throw;
      continue;
    }
    const double v = j.value();
    if (!(v > 0.0)) throw Error(ErrorCode::non_positive_f, "f = " + fmt17(v) + " at " + point_label(x));
    fit.A = std::max({fit.A, v / d, d / v});
    for (const auto& a : alphas) {
      if (a.order() < 1) continue;
      auto& b = fit.B_order[static_cast<std::size_t>(a.order() - 1)];
      b = std::max(b, std::abs(j.derivative(a)) * std::pow(d, a.order() - 1));
    }
    ++fit.points;
  }
  for (double b : fit.B_order) fit.B = std::max(fit.B, b);
  return fit;
}

RegularizedDistance regularized_distance(const Stratification& S, int p, double kappa, const GridSpec& grid) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw Error(ErrorCode::invalid_argument, "kappa must lie in (0, 1)");
  ValidatedStratification ctx = validate_stratification(S, p, grid);
  RegularizedDistance rd{approximate(ctx, kappa), 1.0 / (1.0 - kappa), 0.0, 0.0, {}};
  rd.report.merge(ctx.report);
  rd.report.merge(rd.run.report);
  const auto fit = fit_equivalence(rd.run.f, *ctx.s.W, p, grid.lattice(), grid.collar);
  rd.A_fitted = fit.A;
  rd.B_fitted = fit.B;
  rd.report.record("regdist", "equivalence_A", "", rd.A_claimed, fit.A, 1e-9);
  rd.report.note("regdist", "A_fitted", fit.A);
  rd.report.note("regdist", "B_fitted", fit.B);
  for (std::size_t q = 0; q < fit.B_order.size(); ++q)
    rd.report.note("regdist", "B_order_" + std::to_string(q + 1), fit.B_order[q]);
  return rd;
}

}  // namespace regdist
