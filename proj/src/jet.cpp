#include "regdist/jet.hpp"

#include <cmath>

#include "regdist/error.hpp"

namespace regdist {

Jet::Jet(const JetLayout& layout, double value) : layout_(&layout), c_(layout.size(), 0.0) { c_[0] = value; }

Jet Jet::variable(const JetLayout& layout, int axis, double x0) {
  Jet j(layout, x0);
  if (layout.order() >= 1) j.c_[layout.unit(axis)] = 1.0;
  return j;
}

std::vector<Jet> Jet::variables(std::span<const double> x, int order) {
  const JetLayout& layout = JetLayout::get(static_cast<int>(x.size()), order);
  std::vector<Jet> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(variable(layout, static_cast<int>(i), x[i]));
  return out;
}

double Jet::derivative(const MultiIndex& alpha) const {
  std::size_t k = layout_->find(alpha);
  if (k == JetLayout::npos) return 0.0;
  return alpha.factorial() * c_[k];
}

Jet& Jet::operator+=(const Jet& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }

Jet Jet::operator-() const {
  Jet r = *this;
  for (double& v : r.c_) v = -v;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r(*a.layout_, 0.0);
  for (const auto& t : a.layout_->product_terms()) r.c_[t.out] += a.c_[t.a] * b.c_[t.b];
  return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator/(double s, const Jet& a) { return reciprocal(a) * s; }

Jet compose_taylor(const Jet& x, std::span<const double> taylor) {
  const int p = x.layout().order();
  Jet h = x - x.value();
  // Horner in h; powers above p vanish so only the first p+1 coefficients matter.
  int top = std::min<int>(p, static_cast<int>(taylor.size()) - 1);
  Jet r(x.layout(), taylor[static_cast<std::size_t>(top)]);
  for (int k = top - 1; k >= 0; --k) {
    r = r * h;
    r += taylor[static_cast<std::size_t>(k)];
  }
  return r;
}

Jet compose_taylor(std::span<const Jet> inner, std::span<const double> coeffs) {
  if (inner.empty()) throw Error(ErrorCode::invalid_argument, "compose_taylor with no inner jets");
  const JetLayout& jl = inner[0].layout();
  const int p = jl.order();
  const int m = static_cast<int>(inner.size());
  const JetLayout& outer = JetLayout::get(m, p);
  if (coeffs.size() < outer.size()) throw Error(ErrorCode::invalid_argument, "compose_taylor coefficient count");

  std::vector<std::vector<Jet>> pw(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    auto& row = pw[static_cast<std::size_t>(i)];
    Jet h = inner[static_cast<std::size_t>(i)] - inner[static_cast<std::size_t>(i)].value();
    row.emplace_back(jl, 1.0);
    for (int k = 1; k <= p; ++k) row.push_back(row.back() * h);
  }
  Jet r(jl, 0.0);
  for (std::size_t k = 0; k < outer.size(); ++k) {
    if (coeffs[k] == 0.0) continue;
    const MultiIndex& a = outer.index(k);
    Jet term(jl, coeffs[k]);
    for (int i = 0; i < m; ++i)
      if (a[static_cast<std::size_t>(i)] > 0) term = term * pw[static_cast<std::size_t>(i)][static_cast<std::size_t>(a[static_cast<std::size_t>(i)])];
    r += term;
  }
  return r;
}

Jet square(const Jet& x) { return x * x; }

Jet pow(const Jet& x, int k) {
  if (k < 0) return reciprocal(pow(x, -k));
  Jet r(x.layout(), 1.0);
  Jet base = x;
  while (k > 0) {
    if (k & 1) r = r * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return r;
}

Jet sqrt(const Jet& x) {
  const double a = x.value();
  if (!(a > 0.0)) throw Error(ErrorCode::zero_denominator, "sqrt jet at non-positive value");
  const int p = x.layout().order();
  std::vector<double> t(static_cast<std::size_t>(p + 1));
  // binomial series of a^{1/2}(1 + h/a)^{1/2}
  double binom = 1.0, s = std::sqrt(a);
  for (int k = 0; k <= p; ++k) {
    t[static_cast<std::size_t>(k)] = s * binom / std::pow(a, k);
    binom *= (0.5 - k) / (k + 1);
  }
  return compose_taylor(x, t);
}

Jet reciprocal(const Jet& x) {
  const double a = x.value();
  if (a == 0.0) throw Error(ErrorCode::zero_denominator, "reciprocal jet at zero");
  const int p = x.layout().order();
  std::vector<double> t(static_cast<std::size_t>(p + 1));
  double v = 1.0 / a;
  for (int k = 0; k <= p; ++k) {
    t[static_cast<std::size_t>(k)] = v;
    v *= -1.0 / a;
  }
  return compose_taylor(x, t);
}

Jet exp(const Jet& x) {
  const int p = x.layout().order();
  std::vector<double> t(static_cast<std::size_t>(p + 1));
  double e = std::exp(x.value()), f = 1.0;
  for (int k = 0; k <= p; ++k) {
    if (k > 0) f *= k;
    t[static_cast<std::size_t>(k)] = e / f;
  }
  return compose_taylor(x, t);
}

Jet log(const Jet& x) {
  const double a = x.value();
  if (!(a > 0.0)) throw Error(ErrorCode::zero_denominator, "log jet at non-positive value");
  const int p = x.layout().order();
  std::vector<double> t(static_cast<std::size_t>(p + 1));
  t[0] = std::log(a);
  for (int k = 1; k <= p; ++k) t[static_cast<std::size_t>(k)] = ((k % 2) ? 1.0 : -1.0) / (k * std::pow(a, k));
  return compose_taylor(x, t);
}

namespace {

Jet trig(const Jet& x, int shift) {
  const int p = x.layout().order();
  std::vector<double> t(static_cast<std::size_t>(p + 1));
  const double s = std::sin(x.value()), c = std::cos(x.value());
  const double cyc[4] = {s, c, -s, -c};
  double f = 1.0;
  for (int k = 0; k <= p; ++k) {
    if (k > 0) f *= k;
    t[static_cast<std::size_t>(k)] = cyc[(k + shift) % 4] / f;
  }
  return compose_taylor(x, t);
}

}  // namespace

Jet sin(const Jet& x) { return trig(x, 0); }
Jet cos(const Jet& x) { return trig(x, 1); }

Jet abs(const Jet& x) {
  if (x.value() == 0.0) throw Error(ErrorCode::zero_denominator, "abs jet at zero");
  return x.value() > 0.0 ? x : -x;
}

Jet norm(std::span<const Jet> v) {
  Jet s = square(v[0]);
  for (std::size_t i = 1; i < v.size(); ++i) s += square(v[i]);
  return sqrt(s);
}

}  // namespace regdist
