#include "regdist/bump.hpp"

#include <algorithm>
#include <cmath>

#include "regdist/error.hpp"

namespace regdist {

namespace {

constexpr double kMargin = 0.9;
// fitted Λ(W) constants of the graph inputs are inflated by this much
constexpr double kFitSlack = 1.1;
constexpr double kExactTol = 1e-12;

std::vector<double> values(std::span<const Jet> x) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i].value();
  return v;
}

RegularFunction zero_function(int n, const OraclePtr& W, int p) { return cert_constant(n, 0.0, W, p); }

RegularFunction indicator(const CellPtr& cell, const OraclePtr& W, int p) {
  RegularFunction r = cert_constant(cell->ambient_dim(), 1.0, W, p);
  r.field = ScalarField::exact(
      cell->ambient_dim(),
      [cell](std::span<const Jet> x) { return Jet(x[0].layout(), cell->contains(values(x)) ? 1.0 : 0.0); },
      [cell](std::span<const double> x) { return cell->contains(x) ? 1.0 : 0.0; });
  r.cert.lower_bound.reset();
  r.range = std::make_pair(0.0, 1.0);
  r.domain = "indicator of " + cell->describe();
  return r;
}

// (1 − λ)·q + λ with the certificate of the Leibniz/sum chain
RegularFunction blend(const RegularFunction& lambda, const RegularFunction& q) {
  RegularFunction one_minus = cert_shift(cert_scale(lambda, -1.0), 1.0);
  one_minus.range = std::make_pair(0.0, 1.0);
  one_minus.cert.sup_bound = 1.0;
  RegularFunction r = cert_sum(cert_product(one_minus, q), lambda);
  auto L = lambda.field, Q = q.field;
  r.field = ScalarField::exact(
      L.dim(),
      [L, Q](std::span<const Jet> x) {
        Jet l = L.eval(x);
        return (1.0 - l) * Q.eval(x) + l;
      },
      [L, Q](std::span<const double> x) {
        const double l = L.value(x);
        if (l == 1.0) return 1.0;
        return (1.0 - l) * Q.value(x) + l;
      });
  r.range = std::make_pair(0.0, 1.0);
  r.cert.sup_bound = 1.0;
  r.cert.lower_bound.reset();
  return r;
}

struct Fit {
  std::vector<double> Mq;
  double sup = 0.0, inf = kInfinity;
};

// per order sup |D^α f| d^{|α|−k}, and sup / inf of |f|/d^k over the points
Fit fit_against_w(const ScalarField& f, const std::vector<Point>& pts, const DistanceOracle& W, int k, int p) {
  Fit r;
  r.Mq.assign(static_cast<std::size_t>(p), 0.0);
  const auto alphas = multi_index_enumerate(f.dim(), p);
  for (const auto& x : pts) {
    const double d = W.distance(x);
    Jet j = f.jet(x, p);
    const double v = std::abs(j.value()) / std::pow(d, k);
    r.sup = std::max(r.sup, v);
    r.inf = std::min(r.inf, v);
    for (const auto& a : alphas)
      if (a.order() >= 1) {
        auto& m = r.Mq[static_cast<std::size_t>(a.order() - 1)];
        m = std::max(m, std::abs(j.derivative(a)) * std::pow(d, a.order() - k));
      }
  }
  for (auto& m : r.Mq) m *= kFitSlack;
  r.sup *= kFitSlack;
  r.inf /= kFitSlack;
  if (pts.empty()) r = {std::vector<double>(static_cast<std::size_t>(p), 1.0), 1.0, 1.0};
  return r;
}

RegularFunction with_fit(ScalarField f, const OraclePtr& W, int k, int p, const Fit& fit, bool lower) {
  RegularFunction r;
  r.field = std::move(f);
  r.domain = "slab";
  r.cert = {W, k, p, 1e-12, fit.sup, std::nullopt, {}};
  r.cert.set_orders(fit.Mq);
  if (lower && fit.inf > 0.0 && std::isfinite(fit.inf)) r.cert.lower_bound = fit.inf;
  return r;
}

void check_recursion(const ValidatedStratification& ctx, std::size_t index) {
  const int m = ctx.s.strata[index].cell->dim();
  for (std::size_t j : ctx.fits[index].boundary_strata) {
    if (j >= ctx.s.strata.size() || ctx.s.strata[j].cell->dim() >= m)
      throw Error(ErrorCode::recursion_base,
                  "boundary of stratum " + ctx.s.strata[index].id + " is not made of lower-dimensional strata");
  }
}

// λ on Z′ = ∂Z \ W at scale η′, with its plateau ρ′
std::pair<RegularFunction, double> boundary_bump(const ValidatedStratification& ctx, std::size_t index, double eta_prime,
                                                 int p) {
  check_recursion(ctx, index);
  const auto& parts = ctx.fits[index].boundary_strata;
  if (parts.empty()) return {zero_function(ctx.s.n, ctx.s.W, p), kMargin * eta_prime};
  std::vector<BumpFunction> bumps;
  for (std::size_t j : parts) bumps.push_back(bump_stratum(ctx, j, eta_prime, p));
  BumpFunction u = bump_union(bumps);
  return {u.psi, u.rho};
}

}  // namespace

CertificateReport BumpConstants::check(const std::string& stage) const {
  CertificateReport r;
  auto strict = [&](const char* name, double lhs, double rhs) {
    r.require(stage, name, fmt17(lhs) + " < " + fmt17(rhs), lhs < rhs);
  };
  strict("rho_positive", 0.0, rho);
  strict("rho_below_eta", rho, eta);
  strict("eta_positive", 0.0, eta);
  strict("eta_below_L", eta, L);
  if (gamma > 0.0 || delta > 0.0) {
    const double rd = rho_prime * delta;
    strict("gamma_positive", 0.0, gamma);
    strict("gamma_bound", gamma, 3.0 * rd * rd / (2.0 * (1.0 + rd) * (1.0 + rd)));
    strict("rho_below_rho_prime_delta", rho, rd);
    strict("rho_slab_bound", rho, L * std::sqrt(gamma) / (std::sqrt(3.0) + std::sqrt(gamma)));
    strict("delta_positive", 0.0, delta);
    strict("delta_below_L", delta, L);
    strict("rho_prime_positive", 0.0, rho_prime);
    strict("rho_prime_below_eta_prime", rho_prime, eta_prime);
    strict("eta_prime_below_eta", eta_prime, eta);
  }
  return r;
}

BumpConstants graph_bump_constants(double L, double eta, double rho_prime) {
  if (!(eta > 0.0)) throw Error(ErrorCode::invalid_argument, "bump scale must be positive");
  if (eta >= L) throw Error(ErrorCode::eta_too_large, "eta = " + fmt17(eta) + " is not below L = " + fmt17(L));
  BumpConstants c;
  c.L = L;
  c.eta = eta;
  c.eta_prime = eta / 2.0;
  c.rho_prime = rho_prime;
  c.delta = L / 2.0;
  const double rd = rho_prime * c.delta;
  c.gamma = kMargin * 3.0 * rd * rd / (2.0 * (1.0 + rd) * (1.0 + rd));
  c.rho = kMargin * std::min(rd, L * std::sqrt(c.gamma) / (std::sqrt(3.0) + std::sqrt(c.gamma)));
  return c;
}

BumpFunction bump_point(const Point& z, const OraclePtr& W, double eta, int p) {
  const double dz = W->distance(z);
  if (!(dz > W->covering_radius())) throw Error(ErrorCode::on_w, "bump centre lies on W");
  if (!(eta > 0.0)) throw Error(ErrorCode::invalid_argument, "bump scale must be positive");
  double rho = eta / 4.0;
  const double R = kMargin * eta / (1.0 + eta) * dz;
  while (!(rho < 1.0 && rho / (1.0 - rho) * dz < R)) rho /= 2.0;
  const double r = rho / (1.0 - rho) * dz;

  // t = 1/3 at radius r and 2/3 at radius R, smooth in |x − z|²
  const double b = 1.0 / (3.0 * (R * R - r * r));
  const double t0 = 1.0 / 3.0 - b * r * r;
  const int n = static_cast<int>(z.size());
  auto t_jet = [z, b, t0](std::span<const Jet> x) {
    Jet s(x[0].layout(), 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) s += square(x[i] - z[i]);
    return s * b + t0;
  };
  RegularFunction t;
  t.field = ScalarField::exact(n, t_jet, [z, b, t0](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) s += (x[i] - z[i]) * (x[i] - z[i]);
    return s * b + t0;
  });
  // derivative bounds of t on B(z, R), the only place where P′(t) ≠ 0
  const double dmax = dz + R;
  t.cert = {W, 0, p, 1e-12, std::max(std::abs(t0), 2.0 / 3.0), std::nullopt, {}};
  std::vector<double> tq(static_cast<std::size_t>(p), 0.0);
  tq[0] = 2.0 * b * R * dmax;
  if (p >= 2) tq[1] = 2.0 * b * dmax * dmax;
  t.cert.set_orders(tq);
  t.range = std::make_pair(t0, 2.0 / 3.0);
  t.domain = "ball";

  RegularFunction Pt = cert_compose(plateau(p).univariate(), t);
  BumpFunction out;
  out.psi = Pt;
  out.psi.range = std::make_pair(0.0, 1.0);
  out.psi.cert.sup_bound = 1.0;
  out.psi.domain = "R^n";
  out.Z = LinearPieceOracle::point(z);
  out.rho = rho;
  out.eta = eta;
  out.c.eta = eta;
  out.c.rho = rho;
  out.c.L = kInfinity;
  out.target = "point";
  return out;
}

RegularFunction graph_plateau_term(const ValidatedStratification& ctx, std::size_t index, double gamma, int p) {
  const CellPtr cell = ctx.s.strata[index].cell;
  if (cell->kind() != CellKind::graph) throw Error(ErrorCode::invalid_argument, "plateau term needs a graph stratum");
  const OraclePtr W = ctx.s.W;
  const int n = cell->ambient_dim(), m = cell->dim();
  const int fibres = n - m;

  ScalarField gphi = lift_through_graph(cell, distance_field(W));

  // fit points: across the support |w − φ(u)| ≤ √(2γ/3)·d((u,φ(u)),W)
  const double tau = std::sqrt(2.0 * gamma / 3.0);
  std::vector<Point> pts;
  for (const auto& z : cell->samples(ctx.grid)) {
    const double dphi = W->distance(z);
    if (dphi <= std::max(ctx.grid.collar, W->covering_radius())) continue;
    for (int j = 0; j < fibres; ++j)
      for (int k = -4; k <= 4; ++k) {
        Point y = cell->to_local(z);
        y[static_cast<std::size_t>(m + j)] += 0.25 * k * tau * dphi;
        Point x = cell->to_global(y);
        if (cell->in_slab(x) && W->distance(x) > ctx.grid.collar) pts.push_back(std::move(x));
      }
  }

  std::vector<RegularFunction> e;
  for (int j = 0; j < fibres; ++j) {
    ScalarField ej = ScalarField::exact(
        n, [cell, j](std::span<const Jet> x) { return cell->graph_offset(x)[static_cast<std::size_t>(j)]; },
        [cell, j, m](std::span<const double> x) {
          Point y = cell->to_local(x);
          Point g = cell->to_local(cell->graph_point(x));
          return y[static_cast<std::size_t>(m + j)] - g[static_cast<std::size_t>(m + j)];
        },
        [cell](std::span<const double> x) { return cell->in_slab(x); });
    e.push_back(with_fit(ej, W, 1, p, fit_against_w(ej, pts, *W, 1, p), false));
  }
  RegularFunction G = with_fit(gphi, W, 1, p, fit_against_w(gphi, pts, *W, 1, p), true);

  RegularFunction E2 = cert_product(e[0], e[0]);
  for (int j = 1; j < fibres; ++j) E2 = cert_sum(E2, cert_product(e[static_cast<std::size_t>(j)], e[static_cast<std::size_t>(j)]));
  RegularFunction T = cert_scale(cert_product(E2, cert_reciprocal(cert_product(G, G))), 1.0 / gamma);
  T.range = std::make_pair(0.0, *T.cert.sup_bound);
  RegularFunction Q = cert_compose(plateau(p).univariate(), T);

  const Univariate P = plateau(p).univariate();
  Q.field = ScalarField::exact(
      n,
      [cell, gphi, gamma, P](std::span<const Jet> x) {
        auto v = values(x);
        if (!cell->in_slab(v)) return Jet(x[0].layout(), 0.0);
        auto off = cell->graph_offset(x);
        Jet s(x[0].layout(), 0.0);
        for (const auto& o : off) s += square(o);
        // P vanishes for t ≥ 2/3: skip the division where it cannot matter
        Jet g = gphi.eval(x);
        if (s.value() >= 2.0 / 3.0 * gamma * g.value() * g.value()) return Jet(x[0].layout(), 0.0);
        return P.apply(s / (square(g) * gamma));
      },
      [cell, gphi, gamma, P, m](std::span<const double> x) {
        if (!cell->in_slab(x)) return 0.0;
        Point y = cell->to_local(x), g = cell->to_local(cell->graph_point(x));
        double s = 0.0;
        for (std::size_t k = static_cast<std::size_t>(m); k < y.size(); ++k) s += (y[k] - g[k]) * (y[k] - g[k]);
        if (s == 0.0) return 1.0;
        const double d = gphi.value(x);
        return P.value(s / (gamma * d * d));
      });
  Q.range = std::make_pair(0.0, 1.0);
  Q.cert.sup_bound = 1.0;
  Q.domain = "R^n";
  return Q;
}

BumpFunction bump_cell(const ValidatedStratification& ctx, std::size_t index, double eta, int p) {
  const CellPtr cell = ctx.s.strata.at(index).cell;
  if (cell->kind() != CellKind::graph || cell->dim() >= cell->ambient_dim())
    throw Error(ErrorCode::invalid_argument, "bump_cell needs a graph stratum");
  if (eta >= cell->L()) throw Error(ErrorCode::eta_too_large, "eta = " + fmt17(eta) + " is not below L = " + fmt17(cell->L()));
  auto [lambda, rho_prime] = boundary_bump(ctx, index, eta / 2.0, p);
  BumpFunction out;
  out.c = graph_bump_constants(cell->L(), eta, rho_prime);
  RegularFunction q = graph_plateau_term(ctx, index, out.c.gamma, p);
  out.psi = blend(lambda, q);
  out.psi.domain = "R^n";
  out.Z = cell->closure();
  out.rho = out.c.rho;
  out.eta = eta;
  out.target = ctx.s.strata[index].id;
  return out;
}

BumpFunction bump_open_cell(const ValidatedStratification& ctx, std::size_t index, double eta, int p) {
  const CellPtr cell = ctx.s.strata.at(index).cell;
  if (cell->dim() != cell->ambient_dim()) throw Error(ErrorCode::invalid_argument, "bump_open_cell needs an open stratum");
  if (!(eta > 0.0)) throw Error(ErrorCode::invalid_argument, "bump scale must be positive");
  auto [lambda, rho_prime] = boundary_bump(ctx, index, eta / 2.0, p);
  BumpFunction out;
  out.psi = blend(lambda, indicator(cell, ctx.s.W, p));
  out.psi.domain = "R^n";
  out.c.eta = eta;
  out.c.eta_prime = eta / 2.0;
  out.c.rho_prime = rho_prime;
  out.c.rho = kMargin * rho_prime;
  out.c.L = cell->L();
  out.Z = cell->closure();
  out.rho = out.c.rho;
  out.eta = eta;
  out.target = ctx.s.strata[index].id;
  return out;
}

BumpFunction bump_stratum(const ValidatedStratification& ctx, std::size_t index, double eta, int p) {
  const CellPtr& cell = ctx.s.strata.at(index).cell;
  return cell->dim() == cell->ambient_dim() ? bump_open_cell(ctx, index, eta, p) : bump_cell(ctx, index, eta, p);
}

BumpFunction bump_union(const std::vector<BumpFunction>& bumps) {
  if (bumps.empty()) throw Error(ErrorCode::empty_set, "bump_union of no bumps");
  const auto& first = bumps.front();
  for (const auto& b : bumps) {
    if (b.psi.cert.W != first.psi.cert.W) throw Error(ErrorCode::mixed_reference, "bumps refer to different sets W");
    if (b.psi.cert.p != first.psi.cert.p) throw Error(ErrorCode::mixed_reference, "bumps have different orders p");
    if (std::abs(b.eta - first.eta) > 1e-15 * first.eta) throw Error(ErrorCode::mixed_reference, "bumps have different scales eta");
  }
  RegularFunction sum = bumps.front().psi;
  for (std::size_t i = 1; i < bumps.size(); ++i) sum = cert_sum(sum, bumps[i].psi);
  sum.range = std::make_pair(0.0, static_cast<double>(bumps.size()));
  sum.cert.sup_bound = static_cast<double>(bumps.size());

  BumpFunction out;
  out.psi = cert_shift(cert_scale(cert_compose(plateau(first.psi.cert.p).univariate(), sum), -1.0), 1.0);
  std::vector<ScalarField> fs;
  for (const auto& b : bumps) fs.push_back(b.psi.field);
  const Univariate P = plateau(first.psi.cert.p).univariate();
  out.psi.field = ScalarField::exact(
      first.psi.field.dim(),
      [fs, P](std::span<const Jet> x) {
        Jet s = fs[0].eval(x);
        for (std::size_t i = 1; i < fs.size(); ++i) s += fs[i].eval(x);
        return 1.0 - P.apply(s);
      },
      [fs, P](std::span<const double> x) {
        double s = 0.0;
        for (const auto& f : fs) s += f.value(x);
        return 1.0 - P.value(s);
      });
  out.psi.range = std::make_pair(0.0, 1.0);
  out.psi.cert.sup_bound = 1.0;
  out.psi.domain = "R^n";
  std::vector<OraclePtr> zs;
  double rho = kInfinity;
  std::string target;
  for (const auto& b : bumps) {
    zs.push_back(b.Z);
    rho = std::min(rho, b.rho);
    target += (target.empty() ? "" : "+") + b.target;
  }
  out.Z = make_union(zs, first.psi.field.dim());
  out.rho = rho;
  out.eta = first.eta;
  out.c.eta = first.eta;
  out.c.rho = rho;
  out.target = target;
  return out;
}

CertificateReport bump_check(const BumpFunction& b, const OraclePtr& W, const std::vector<Point>& points) {
  CertificateReport r;
  const std::string stage = "bump/" + b.target;
  std::size_t in = 0, out = 0;
  for (const auto& x : points) {
    const double dw = W->distance(x);
    if (!(dw > W->covering_radius())) continue;
    const double v = b.value(x);
    const std::string loc = point_label(x);
    r.record(stage, "range_low", loc, 0.0, -v);
    r.record(stage, "range_high", loc, 1.0, v);
    const double dz = b.Z->distance(x);
    if (g_eta_verdict(dz, b.Z->covering_radius(), dw, W->covering_radius(), b.rho) == Verdict::in) {
      r.record(stage, "plateau", loc, kExactTol, std::abs(1.0 - v));
      ++in;
    }
    if (g_eta_verdict(dz, b.Z->covering_radius(), dw, W->covering_radius(), b.eta) == Verdict::out) {
      r.record(stage, "support", loc, kExactTol, std::abs(v));
      ++out;
    }
  }
  r.note(stage, "plateau_points", static_cast<double>(in));
  r.note(stage, "support_points", static_cast<double>(out));
  return r;
}

// ---- partition of unity ----------------------------------------------------------------------

namespace {

// q_i jets at x for every stratum, then the tower T_i
std::vector<Jet> tower_jets(const std::vector<ScalarField>& q, std::span<const Jet> x) {
  std::vector<Jet> omega;
  Jet T(x[0].layout(), 0.0);
  for (const auto& f : q) {
    if (T.value() == 1.0) {
      omega.emplace_back(x[0].layout(), 0.0);
      continue;
    }
    Jet w = (1.0 - T) * f.eval(x);
    T += w;
    omega.push_back(std::move(w));
  }
  return omega;
}

std::vector<double> tower_values(const std::vector<ScalarField>& q, std::span<const double> x) {
  std::vector<double> omega;
  double T = 0.0;
  for (const auto& f : q) {
    const double w = T == 1.0 ? 0.0 : (1.0 - T) * f.value(x);
    T += w;
    omega.push_back(w);
  }
  return omega;
}

double tower_sum(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += v;
  return s;
}

}  // namespace

double Partition::denominator(std::span<const double> x) const {
  std::vector<ScalarField> fs;
  for (const auto& f : q) fs.push_back(f.field);
  return tower_sum(tower_values(fs, x));
}

Partition partition_of_unity(const ValidatedStratification& ctx, const std::vector<double>& eta, int p) {
  const auto& S = ctx.s;
  const std::size_t s = S.strata.size();
  if (eta.size() != s) throw Error(ErrorCode::invalid_argument, "one scale per stratum expected");
  Partition part;
  part.eta = eta;
  part.rho.assign(s, 0.0);
  part.constants.resize(s);
  for (std::size_t i = 0; i < s; ++i) {
    const CellPtr& cell = S.strata[i].cell;
    if (i > 0 && cell->dim() < S.strata[i - 1].cell->dim())
      throw Error(ErrorCode::invalid_argument, "strata must be ordered by dimension");
    check_recursion(ctx, i);
    if (cell->kind() == CellKind::graph) {
      // the tower below plays the role of λ: its plateau covers the lower plateaus
      double rho_prime = kMargin * eta[i] / 2.0;
      for (std::size_t j : ctx.fits[i].boundary_strata) rho_prime = std::min(rho_prime, part.rho[j]);
      part.constants[i] = graph_bump_constants(cell->L(), eta[i], rho_prime);
      part.q.push_back(graph_plateau_term(ctx, i, part.constants[i].gamma, p));
    } else {
      part.constants[i].eta = eta[i];
      part.constants[i].L = cell->L();
      part.constants[i].rho = kMargin * eta[i];
      part.q.push_back(indicator(cell, S.W, p));
    }
    part.rho[i] = part.constants[i].rho;
  }

  // certificates: T_i = T_{i−1} + (1 − T_{i−1}) q_i, ψ_i = (1 − T_{i−1}) q_i
  std::vector<RegularFunction> psi;
  RegularFunction T = zero_function(S.n, S.W, p);
  for (std::size_t i = 0; i < s; ++i) {
    RegularFunction one_minus = cert_shift(cert_scale(T, -1.0), 1.0);
    one_minus.range = std::make_pair(0.0, 1.0);
    one_minus.cert.sup_bound = 1.0;
    RegularFunction w = cert_product(one_minus, part.q[i]);
    w.range = std::make_pair(0.0, 1.0);
    w.cert.sup_bound = 1.0;
    psi.push_back(w);
    T = cert_sum(T, w);
    T.range = std::make_pair(0.0, 1.0);
    T.cert.sup_bound = 1.0;
  }
  // Σψ = T_s is identically 1 off W when the strata tile the complement
  // (each point sits in a stratum whose q equals 1 there); the grid check
  // below refuses gaps
  RegularFunction inv = cert_reciprocal(cert_constant(S.n, 1.0, S.W, p));

  std::vector<ScalarField> qf;
  for (const auto& f : part.q) qf.push_back(f.field);
  for (std::size_t i = 0; i < s; ++i) {
    RegularFunction om = cert_product(psi[i], inv);
    om.field = ScalarField::exact(
        S.n,
        [qf, i](std::span<const Jet> x) {
          auto w = tower_jets(qf, x);
          Jet d = w[0];
          for (std::size_t j = 1; j < w.size(); ++j) d += w[j];
          return w[i] / d;
        },
        [qf, i](std::span<const double> x) {
          auto w = tower_values(qf, x);
          return w[i] / tower_sum(w);
        });
    om.range = std::make_pair(0.0, 1.0);
    om.cert.sup_bound = 1.0;
    om.cert.lower_bound.reset();
    om.domain = "complement of W";
    part.omega.push_back(std::move(om));
  }

  for (std::size_t i = 0; i < s; ++i) {
    const std::string stage = "partition/" + S.strata[i].id;
    part.report.note(stage, "eta", part.eta[i]);
    part.report.note(stage, "rho", part.rho[i]);
    if (part.constants[i].gamma > 0.0) {
      part.report.note(stage, "gamma", part.constants[i].gamma);
      part.report.merge(part.constants[i].check(stage));
    }
    part.report.note(stage, "M", part.omega[i].cert.M);
  }

  const double floor_dist = std::max(ctx.grid.collar, S.W->covering_radius());
  for (const auto& x : ctx.grid.lattice()) {
    if (S.W->distance(x) <= floor_dist) continue;
    const double d = tower_sum(tower_values(qf, x));
    if (d < kPositivityFloor)
      throw Error(ErrorCode::coverage_gap, "partition denominator " + fmt17(d) + " below " + fmt17(kPositivityFloor) +
                                               " at " + point_label(x));
  }
  return part;
}

Partition partition_of_unity(const ValidatedStratification& ctx, double eta, int p) {
  return partition_of_unity(ctx, std::vector<double>(ctx.s.strata.size(), eta), p);
}

CertificateReport partition_check(const Partition& part, const ValidatedStratification& ctx,
                                  const std::vector<Point>& points) {
  CertificateReport r;
  const auto& S = ctx.s;
  for (const auto& x : points) {
    const double dw = S.W->distance(x);
    if (!(dw > std::max(ctx.grid.collar, S.W->covering_radius()))) continue;
    const std::string loc = point_label(x);
    double sum = 0.0;
    for (std::size_t i = 0; i < part.size(); ++i) {
      const double w = part.omega[i].field.value(x);
      sum += w;
      const std::string stage = "partition/" + S.strata[i].id;
      r.record(stage, "range_low", loc, 0.0, -w);
      r.record(stage, "range_high", loc, 1.0, w);
      if (w > 0.0) {
        const auto& Z = *S.strata[i].cell->closure();
        const Verdict v = g_eta_verdict(Z.distance(x), Z.covering_radius(), dw, S.W->covering_radius(), part.eta[i]);
        r.require(stage, "support_in_G_eta", loc, v != Verdict::out);
      }
    }
    r.record("partition", "sum_is_one", loc, 1e-12, std::abs(sum - 1.0));
  }
  return r;
}

}  // namespace regdist
