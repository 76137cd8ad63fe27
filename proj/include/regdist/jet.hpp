#pragma once

#include <span>
#include <vector>

#include "regdist/multi_index.hpp"

namespace regdist {

/// Truncated multivariate Taylor polynomial: coefficient c_α of (x − x₀)^α for
/// |α| ≤ p. Arithmetic on jets propagates derivatives exactly up to order p.
class Jet {
 public:
  Jet() = default;
  Jet(const JetLayout& layout, double value);

  /// The coordinate function x_axis expanded at x0.
  static Jet variable(const JetLayout& layout, int axis, double x0);
  /// Jets of all coordinates at the point x.
  static std::vector<Jet> variables(std::span<const double> x, int order);

  const JetLayout& layout() const { return *layout_; }
  double value() const { return c_[0]; }
  double coeff(std::size_t k) const { return c_[k]; }
  double& coeff(std::size_t k) { return c_[k]; }
  std::size_t size() const { return c_.size(); }
  /// D^α at the expansion point, i.e. α!·c_α; zero above the truncation order.
  double derivative(const MultiIndex& alpha) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator-=(double s) { c_[0] -= s; return *this; }
  Jet& operator*=(double s);
  Jet operator-() const;

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
  friend Jet operator/(double s, const Jet& a);

 private:
  const JetLayout* layout_ = nullptr;
  std::vector<double> c_;
};

/// f∘x given the Taylor coefficients f^{(k)}(x₀)/k! of a univariate f at x₀ = x.value().
Jet compose_taylor(const Jet& x, std::span<const double> taylor);

/// F∘(x_1..x_m) for F given by its Taylor coefficients at (x_i.value()), laid out
/// in JetLayout::get(m, order) order.
Jet compose_taylor(std::span<const Jet> inner, std::span<const double> coeffs);

Jet square(const Jet& x);
Jet pow(const Jet& x, int k);
Jet sqrt(const Jet& x);
Jet reciprocal(const Jet& x);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
/// |x| away from 0; throws at a zero value.
Jet abs(const Jet& x);
/// Euclidean norm of a vector of jets; throws at the origin.
Jet norm(std::span<const Jet> v);

}  // namespace regdist
