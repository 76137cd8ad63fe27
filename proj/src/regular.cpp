#include "regdist/regular.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "regdist/error.hpp"

namespace regdist {

namespace {

constexpr double kMinM = 1e-12;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::vector<double> derive(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t j = 1; j < c.size(); ++j) d.push_back(static_cast<double>(j) * c[j]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

double horner(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) v = v * s + c[j];
  return v;
}

std::vector<double> orders(const RegularityCertificate& c) {
  std::vector<double> m;
  for (int q = 1; q <= c.p; ++q) m.push_back(c.order_bound(q));
  return m;
}

void check_same_reference(const RegularityCertificate& a, const RegularityCertificate& b) {
  if (a.W != b.W) throw Error(ErrorCode::certificate_mismatch, "certificates refer to different sets W");
  if (a.p != b.p) throw Error(ErrorCode::certificate_mismatch, "certificates have different orders p");
}

ScalarField::DomainFn both(const ScalarField& f, const ScalarField& g) {
  auto a = f.domain(), b = g.domain();
  if (!a && !b) return {};
  return [a, b](std::span<const double> x) { return (!a || a(x)) && (!b || b(x)); };
}

std::string join_domain(const std::string& a, const std::string& b) { return a == b ? a : "(" + a + ") and (" + b + ")"; }

}  // namespace

void RegularityCertificate::set_orders(std::vector<double> m) {
  for (auto& v : m) v = std::max(v, kMinM);
  Mq = std::move(m);
  M = kMinM;
  for (double v : Mq) M = std::max(M, v);
}

double bell_partial(int q, int m, const std::vector<double>& x) {
  // B_{n,k} = Σ_i C(n−1, i−1) x_i B_{n−i,k−1}
  std::vector<std::vector<double>> B(static_cast<std::size_t>(q + 1), std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
  B[0][0] = 1.0;
  for (int n = 1; n <= q; ++n)
    for (int k = 1; k <= std::min(n, m); ++k) {
      double s = 0.0;
      for (int i = 1; i <= n - k + 1; ++i)
        s += binomial(n - 1, i - 1) * x[static_cast<std::size_t>(i - 1)] * B[static_cast<std::size_t>(n - i)][static_cast<std::size_t>(k - 1)];
      B[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] = s;
    }
  return B[static_cast<std::size_t>(q)][static_cast<std::size_t>(m)];
}

double stirling2(int q, int m) {
  if (q == 0 && m == 0) return 1.0;
  if (q <= 0 || m <= 0 || m > q) return 0.0;
  // S(q,m) = m S(q−1,m) + S(q−1,m−1)
  std::vector<std::vector<double>> s(static_cast<std::size_t>(q + 1), std::vector<double>(static_cast<std::size_t>(q + 1), 0.0));
  s[0][0] = 1.0;
  for (int i = 1; i <= q; ++i)
    for (int j = 1; j <= i; ++j)
      s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          j * s[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] + s[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
  return s[static_cast<std::size_t>(q)][static_cast<std::size_t>(m)];
}

// ---- plateau ----------------------------------------------------------------------

Plateau::Plateau(int p) : p_(p) {
  if (p < 1) throw Error(ErrorCode::invalid_argument, "plateau order must be >= 1");
  // S_p(s) = s^{p+1} Σ_n C(p+n, n) C(2p+1, p−n) (−s)^n
  s_.assign(static_cast<std::size_t>(2 * p + 2), 0.0);
  for (int n = 0; n <= p; ++n)
    s_[static_cast<std::size_t>(p + 1 + n)] = binomial(p + n, n) * binomial(2 * p + 1, p - n) * ((n % 2) ? -1.0 : 1.0);

  // sup over s ∈ [0,1] of |S^{(i)}| by sampling plus the slope of the next
  // derivative, which bounds the gap between samples
  constexpr int kSamples = 4096;
  std::vector<double> c = s_;
  sup_.push_back(1.0);
  for (int i = 1; i <= 2 * p + 2; ++i) {
    c = derive(c);
    std::vector<double> next = derive(c);
    double slope = 0.0;
    for (double v : next) slope += std::abs(v);
    double m = 0.0;
    for (int k = 0; k <= kSamples; ++k) m = std::max(m, std::abs(horner(c, static_cast<double>(k) / kSamples)));
    sup_.push_back(std::pow(3.0, i) * (m + 0.5 * slope / kSamples));
  }
}

double Plateau::value(double t) const {
  if (t <= 1.0 / 3.0) return 1.0;
  if (t >= 2.0 / 3.0) return 0.0;
  return 1.0 - horner(s_, 3.0 * (t - 1.0 / 3.0));
}

std::vector<double> Plateau::taylor(double t, int order) const {
  std::vector<double> out(static_cast<std::size_t>(order + 1), 0.0);
  out[0] = value(t);
  if (t <= 1.0 / 3.0 || t >= 2.0 / 3.0) return out;
  const double s = 3.0 * (t - 1.0 / 3.0);
  std::vector<double> c = s_;
  double scale = 1.0;
  for (int j = 1; j <= order; ++j) {
    c = derive(c);
    scale *= 3.0 / j;
    out[static_cast<std::size_t>(j)] = -scale * horner(c, s);
  }
  return out;
}

double Plateau::sup_derivative(int i) const {
  if (i == 0) return 1.0;
  if (i >= static_cast<int>(sup_.size())) return 0.0;
  return sup_[static_cast<std::size_t>(i)];
}

Univariate Plateau::univariate() const {
  const Plateau* self = &plateau(p_);
  return Univariate{[self](double t, int order) { return self->taylor(t, order); },
                    [self](int i, double, double) { return self->sup_derivative(i); }, "P"};
}

const Plateau& plateau(int p) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Plateau>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[p];
  if (!slot) slot = std::make_unique<Plateau>(p);
  return *slot;
}

ScalarField smoothstep_P(int p) {
  const Plateau* P = &plateau(p);
  return ScalarField::exact(
      1, [P](std::span<const Jet> x) { return compose_taylor(x[0], P->taylor(x[0].value(), x[0].layout().order())); },
      [P](std::span<const double> x) { return P->value(x[0]); });
}

// ---- combinators ------------------------------------------------------------------------

RegularFunction cert_product(const RegularFunction& f, const RegularFunction& g) {
  check_same_reference(f.cert, g.cert);
  if (!f.cert.sup_bound || !g.cert.sup_bound) throw Error(ErrorCode::missing_sup_bound, "cert_product needs sup bounds on both factors");
  const int p = f.cert.p;
  auto b = [](const RegularityCertificate& c, int j) { return j == 0 ? *c.sup_bound : c.order_bound(j); };
  // Leibniz: Σ_{β≤α} C(α,β) D^β f D^{α−β} g, grouped by |β| (Vandermonde)
  std::vector<double> Mq;
  for (int q = 1; q <= p; ++q) {
    double s = 0.0;
    for (int j = 0; j <= q; ++j) s += binomial(q, j) * b(f.cert, j) * b(g.cert, q - j);
    Mq.push_back(s);
  }
  RegularFunction r;
  auto F = f.field, G = g.field;
  r.field = ScalarField::exact(
      F.dim(), [F, G](std::span<const Jet> x) { return F.eval(x) * G.eval(x); },
      [F, G](std::span<const double> x) { return F.value(x) * G.value(x); }, both(F, G));
  if (F.kind() == DerivativeKind::finite_difference || G.kind() == DerivativeKind::finite_difference) {
    // keep the flag: derivatives still come from finite-difference probes
    r.field = ScalarField::from_values(
        F.dim(), [F, G](std::span<const double> x) { return F.value(x) * G.value(x); },
        [F](std::span<const double> x) { return F.fd_step(x); }, both(F, G));
  }
  r.domain = join_domain(f.domain, g.domain);
  r.cert = {f.cert.W, f.cert.k + g.cert.k, p, kMinM, *f.cert.sup_bound * *g.cert.sup_bound, std::nullopt, {}};
  r.cert.set_orders(std::move(Mq));
  if (f.cert.lower_bound && g.cert.lower_bound) r.cert.lower_bound = *f.cert.lower_bound * *g.cert.lower_bound;
  if (f.range && g.range) {
    const double c[4] = {f.range->first * g.range->first, f.range->first * g.range->second,
                         f.range->second * g.range->first, f.range->second * g.range->second};
    r.range = std::make_pair(std::min({c[0], c[1], c[2], c[3]}), std::max({c[0], c[1], c[2], c[3]}));
  }
  return r;
}

RegularFunction cert_reciprocal(const RegularFunction& f) {
  if (!f.cert.lower_bound || !(*f.cert.lower_bound > 0.0))
    throw Error(ErrorCode::missing_lower_bound, "cert_reciprocal needs a positive lower bound");
  const double a = *f.cert.lower_bound;
  const int p = f.cert.p;
  const auto x = orders(f.cert);
  // Faà di Bruno with h(t) = 1/t: |h^{(m)}(f)| ≤ m!/(a d^k)^{m+1}, blocks bounded per order
  std::vector<double> Mq;
  for (int q = 1; q <= p; ++q) {
    double s = 0.0;
    for (int m = 1; m <= q; ++m) s += bell_partial(q, m, x) * factorial(m) / std::pow(a, m + 1);
    Mq.push_back(s);
  }
  RegularFunction r;
  auto F = f.field;
  auto W = f.cert.W;
  const int k = f.cert.k;
  auto guarded = [F, W, a, k](std::span<const double> x) {
    const double v = F.value(x);
    const double floor = a * std::pow(W->distance(x), k);
    if (!(std::abs(v) >= floor * (1.0 - 1e-9)) || v == 0.0)
      throw Error(ErrorCode::zero_denominator, "|f| fell below the certified lower bound");
    return 1.0 / v;
  };
  if (F.kind() == DerivativeKind::exact) {
    r.field = ScalarField::exact(
        F.dim(), [F](std::span<const Jet> x) { return reciprocal(F.eval(x)); }, guarded, F.domain());
  } else {
    r.field = ScalarField::from_values(F.dim(), guarded, [F](std::span<const double> x) { return F.fd_step(x); }, F.domain());
  }
  r.domain = f.domain;
  r.cert = {f.cert.W, -k, p, kMinM, 1.0 / a, std::nullopt, {}};
  r.cert.set_orders(std::move(Mq));
  if (f.cert.sup_bound && *f.cert.sup_bound > 0.0) r.cert.lower_bound = 1.0 / *f.cert.sup_bound;
  return r;
}

RegularFunction cert_compose(const Univariate& phi, const RegularFunction& f) {
  if (f.cert.k != 0 || !f.cert.sup_bound) throw Error(ErrorCode::unbounded_inner, "cert_compose needs a bounded k = 0 inner function");
  const double A = *f.cert.sup_bound;
  const auto [lo, hi] = f.range.value_or(std::make_pair(-A, A));
  const int p = f.cert.p;
  const auto x = orders(f.cert);
  std::vector<double> Mq;
  for (int q = 1; q <= p; ++q) {
    double s = 0.0;
    for (int i = 1; i <= q; ++i) s += bell_partial(q, i, x) * phi.sup_derivative(i, lo, hi);
    Mq.push_back(s);
  }
  RegularFunction r;
  auto F = f.field;
  if (F.kind() == DerivativeKind::exact) {
    r.field = ScalarField::exact(
        F.dim(), [F, phi](std::span<const Jet> x) { return phi.apply(F.eval(x)); },
        [F, phi](std::span<const double> x) { return phi.value(F.value(x)); }, F.domain());
  } else {
    r.field = ScalarField::from_values(
        F.dim(), [F, phi](std::span<const double> x) { return phi.value(F.value(x)); },
        [F](std::span<const double> x) { return F.fd_step(x); }, F.domain());
  }
  r.domain = f.domain;
  r.cert = {f.cert.W, 0, p, kMinM, phi.sup_derivative(0, lo, hi), std::nullopt, {}};
  r.cert.set_orders(std::move(Mq));
  return r;
}

RegularFunction cert_sum(const RegularFunction& f, const RegularFunction& g) {
  check_same_reference(f.cert, g.cert);
  if (f.cert.k != g.cert.k) throw Error(ErrorCode::certificate_mismatch, "cert_sum needs equal exponents");
  RegularFunction r;
  auto F = f.field, G = g.field;
  if (F.kind() == DerivativeKind::exact && G.kind() == DerivativeKind::exact) {
    r.field = ScalarField::exact(
        F.dim(), [F, G](std::span<const Jet> x) { return F.eval(x) + G.eval(x); },
        [F, G](std::span<const double> x) { return F.value(x) + G.value(x); }, both(F, G));
  } else {
    r.field = ScalarField::from_values(
        F.dim(), [F, G](std::span<const double> x) { return F.value(x) + G.value(x); },
        [F](std::span<const double> x) { return F.fd_step(x); }, both(F, G));
  }
  r.domain = join_domain(f.domain, g.domain);
  r.cert = {f.cert.W, f.cert.k, f.cert.p, kMinM, std::nullopt, std::nullopt, {}};
  std::vector<double> Mq = orders(f.cert);
  for (int q = 1; q <= f.cert.p; ++q) Mq[static_cast<std::size_t>(q - 1)] += g.cert.order_bound(q);
  r.cert.set_orders(std::move(Mq));
  if (f.cert.sup_bound && g.cert.sup_bound) r.cert.sup_bound = *f.cert.sup_bound + *g.cert.sup_bound;
  if (f.range && g.range) r.range = std::make_pair(f.range->first + g.range->first, f.range->second + g.range->second);
  return r;
}

RegularFunction cert_scale(const RegularFunction& f, double c) {
  RegularFunction r = f;
  auto F = f.field;
  if (F.kind() == DerivativeKind::exact) {
    r.field = ScalarField::exact(
        F.dim(), [F, c](std::span<const Jet> x) { return F.eval(x) * c; },
        [F, c](std::span<const double> x) { return c * F.value(x); }, F.domain());
  } else {
    r.field = ScalarField::from_values(
        F.dim(), [F, c](std::span<const double> x) { return c * F.value(x); },
        [F](std::span<const double> x) { return F.fd_step(x); }, F.domain());
  }
  std::vector<double> Mq = orders(f.cert);
  for (auto& v : Mq) v *= std::abs(c);
  r.cert.set_orders(std::move(Mq));
  if (f.cert.sup_bound) r.cert.sup_bound = std::abs(c) * *f.cert.sup_bound;
  if (f.cert.lower_bound) r.cert.lower_bound = std::abs(c) * *f.cert.lower_bound;
  if (c == 0.0) r.cert.lower_bound.reset();
  if (f.range) r.range = c >= 0 ? std::make_pair(c * f.range->first, c * f.range->second)
                                : std::make_pair(c * f.range->second, c * f.range->first);
  return r;
}

RegularFunction cert_shift(const RegularFunction& f, double c) {
  if (f.cert.k != 0) throw Error(ErrorCode::certificate_mismatch, "constant shifts need k = 0");
  RegularFunction r = f;
  auto F = f.field;
  if (F.kind() == DerivativeKind::exact) {
    r.field = ScalarField::exact(
        F.dim(), [F, c](std::span<const Jet> x) { return F.eval(x) + c; },
        [F, c](std::span<const double> x) { return F.value(x) + c; }, F.domain());
  } else {
    r.field = ScalarField::from_values(
        F.dim(), [F, c](std::span<const double> x) { return F.value(x) + c; },
        [F](std::span<const double> x) { return F.fd_step(x); }, F.domain());
  }
  if (f.cert.sup_bound) r.cert.sup_bound = *f.cert.sup_bound + std::abs(c);
  r.cert.lower_bound.reset();
  if (f.range) r.range = std::make_pair(f.range->first + c, f.range->second + c);
  return r;
}

RegularFunction cert_constant(int n, double c, const OraclePtr& W, int p) {
  RegularFunction r;
  r.field = ScalarField::constant(n, c);
  r.cert = {W, 0, p, kMinM, std::abs(c), std::nullopt, {}};
  if (c != 0.0) r.cert.lower_bound = std::abs(c);
  r.range = std::make_pair(c, c);
  return r;
}

// ---- verification ------------------------------------------------------------------------

CertificateReport cert_verify(const RegularFunction& rf, const std::vector<Point>& points, const VerifyOptions& opt) {
  CertificateReport rep;
  const auto& c = rf.cert;
  const DistanceOracle& W = *c.W;
  const ScalarField& f = rf.field;
  const bool exact = f.kind() == DerivativeKind::exact;
  const double tol = exact ? opt.exact_tol : opt.fd_tol;
  // floating-point rounding on tight bounds is not a violation
  constexpr double kRounding = 1e-12;
  const auto alphas = multi_index_enumerate(f.dim(), c.p);
  std::size_t used = 0, singular = 0;
  double deriv_ratio = 0.0;

  for (const auto& x : points) {
    const double d = W.distance(x);
    if (d <= std::max(opt.collar, W.covering_radius()) || !f.in_domain(x)) continue;
    std::vector<double> derivs(alphas.size());
    try {
      if (exact) {
        Jet j = f.jet(x, c.p);
        for (std::size_t i = 0; i < alphas.size(); ++i) derivs[i] = j.derivative(alphas[i]);
      } else {
        derivs[0] = f.value(x);
        for (std::size_t i = 1; i < alphas.size(); ++i) derivs[i] = f.derivative(x, alphas[i]);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::zero_denominator) throw;
      ++singular;
      continue;
    }
    ++used;
    std::string where;
    for (std::size_t i = 0; i < x.size(); ++i) where += (i ? ";" : "") + fmt17(x[i]);
    for (std::size_t i = 1; i < alphas.size(); ++i) {
      const double claimed = c.order_bound(alphas[i].order()) * std::pow(d, c.k - alphas[i].order()) * (1.0 + kRounding);
      rep.record(opt.stage, "order" + std::to_string(alphas[i].order()), where, claimed, std::abs(derivs[i]),
                 tol * claimed + 1e-300);
      deriv_ratio = std::max(deriv_ratio, std::abs(derivs[i]) / claimed);
    }
    if (c.sup_bound) {
      const double claimed = *c.sup_bound * std::pow(d, c.k) * (1.0 + kRounding);
      rep.record(opt.stage, "sup_bound", where, claimed, std::abs(derivs[0]), tol * claimed + 1e-300);
    }
    if (c.lower_bound) {
      const double floor = *c.lower_bound * std::pow(d, c.k) * (1.0 - kRounding);
      rep.record(opt.stage, "lower_bound", where, std::abs(derivs[0]), floor, tol * floor + 1e-300);
    }
  }
  rep.note(opt.stage, "worst_ratio", rep.worst_ratio());
  // how much of the derivative bounds is actually used
  rep.note(opt.stage, "derivative_ratio", deriv_ratio);
  rep.note(opt.stage, "points", static_cast<double>(used));
  if (singular) rep.note(opt.stage, "singular_points", static_cast<double>(singular));
  return rep;
}

CertificateReport cert_verify(const RegularFunction& rf, const GridSpec& grid, VerifyOptions opt) {
  opt.collar = grid.collar;
  return cert_verify(rf, grid.lattice(), opt);
}

}  // namespace regdist
