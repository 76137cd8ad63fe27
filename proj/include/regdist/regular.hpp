#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "regdist/cells.hpp"
#include "regdist/distance.hpp"
#include "regdist/report.hpp"

namespace regdist {

/// |D^α f(x)| ≤ M·d(x,W)^{k−|α|} for 1 ≤ |α| ≤ p, optionally with
/// a·d^k ≤ |f| ≤ A·d^k.
struct RegularityCertificate {
  OraclePtr W;
  int k = 0;
  int p = 1;
  double M = 1e-12;
  std::optional<double> sup_bound;
  std::optional<double> lower_bound;
  /// Per-order constants: order q is bounded by Mq[q−1] ≤ M. Empty means M for every order.
  std::vector<double> Mq;

  double order_bound(int q) const { return q >= 1 && q <= static_cast<int>(Mq.size()) ? Mq[static_cast<std::size_t>(q - 1)] : M; }
  /// Sets Mq and M = max Mq (floored at 1e-12).
  void set_orders(std::vector<double> m);
};

struct RegularFunction {
  ScalarField field;
  std::string domain = "complement of W";
  RegularityCertificate cert;
  /// Known value range, used by cert_compose; defaults to [−A, A] for k = 0.
  std::optional<std::pair<double, double>> range;
};

/// Univariate outer function for cert_compose: Taylor coefficients
/// Φ^{(j)}(t)/j! for j ≤ order, and sound bounds on sup|Φ^{(i)}| over an interval.
struct Univariate {
  std::function<std::vector<double>(double, int)> taylor;
  std::function<double(int, double, double)> sup_derivative;
  std::string name;

  Jet apply(const Jet& x) const { return compose_taylor(x, taylor(x.value(), x.layout().order())); }
  double value(double t) const { return taylor(t, 0)[0]; }
};

/// The C^p plateau function: 1 on (−∞, 1/3], 0 on [2/3, ∞), reversed Hermite
/// smoothstep of degree 2p+1 in s = 3(t − 1/3) in between.
class Plateau {
 public:
  explicit Plateau(int p);

  int order() const { return p_; }
  double value(double t) const;
  /// P^{(j)}(t)/j! for j ≤ order (any order; zero above 2p+1).
  std::vector<double> taylor(double t, int order) const;
  /// Upper bound on sup_ℝ |P^{(i)}|.
  double sup_derivative(int i) const;
  Univariate univariate() const;

 private:
  int p_;
  std::vector<double> s_;  // smoothstep coefficients in s
  std::vector<double> sup_;
};

const Plateau& plateau(int p);
/// P as a field on ℝ with exact derivatives.
ScalarField smoothstep_P(int p);

/// Stirling numbers of the second kind S(q, m).
double stirling2(int q, int m);
/// Partial Bell polynomial B_{q,m}(x_1, …, x_{q−m+1}); x[j−1] holds x_j.
double bell_partial(int q, int m, const std::vector<double>& x);

RegularFunction cert_product(const RegularFunction& f, const RegularFunction& g);
RegularFunction cert_reciprocal(const RegularFunction& f);
RegularFunction cert_compose(const Univariate& phi, const RegularFunction& f);
RegularFunction cert_sum(const RegularFunction& f, const RegularFunction& g);
RegularFunction cert_scale(const RegularFunction& f, double c);
/// f + c for k = 0 certificates.
RegularFunction cert_shift(const RegularFunction& f, double c);
/// Constant c as a Λ_p^0 function.
RegularFunction cert_constant(int n, double c, const OraclePtr& W, int p);

struct VerifyOptions {
  double collar = 1e-3;
  /// Relative tolerance band on claimed bounds (exact / finite-difference fields).
  double exact_tol = 1e-9;
  double fd_tol = 1e-3;
  std::string stage = "cert_verify";
};

/// Compares |D^α f| against M·d(x,W)^{k−|α|} (and the sup/lower bounds) at
/// every point inside the domain and off W. Records "worst_ratio".
CertificateReport cert_verify(const RegularFunction& rf, const std::vector<Point>& points, const VerifyOptions& opt = {});
CertificateReport cert_verify(const RegularFunction& rf, const GridSpec& grid, VerifyOptions opt = {});

}  // namespace regdist
