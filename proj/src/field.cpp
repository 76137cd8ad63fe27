#include "regdist/field.hpp"

#include <algorithm>
#include <cmath>

#include "regdist/error.hpp"

namespace regdist {

ScalarField ScalarField::from_jet(int n, JetFn f, DomainFn domain) {
  ScalarField s;
  s.n_ = n;
  s.kind_ = DerivativeKind::exact;
  s.jet_ = std::move(f);
  s.domain_ = std::move(domain);
  return s;
}

ScalarField ScalarField::exact(int n, JetFn f, ValueFn value, DomainFn domain) {
  ScalarField s = from_jet(n, std::move(f), std::move(domain));
  s.value_ = std::move(value);
  return s;
}

ScalarField ScalarField::from_values(int n, ValueFn f, StepFn step, DomainFn domain) {
  ScalarField s;
  s.n_ = n;
  s.kind_ = DerivativeKind::finite_difference;
  s.value_ = std::move(f);
  s.step_ = std::move(step);
  s.domain_ = std::move(domain);
  return s;
}

ScalarField ScalarField::constant(int n, double c) {
  return exact(
      n, [c](std::span<const Jet> x) { return Jet(x[0].layout(), c); },
      [c](std::span<const double>) { return c; });
}

ScalarField ScalarField::coordinate(int n, int axis) {
  return exact(
      n, [axis](std::span<const Jet> x) { return x[static_cast<std::size_t>(axis)]; },
      [axis](std::span<const double> x) { return x[static_cast<std::size_t>(axis)]; });
}

double ScalarField::value(std::span<const double> x) const {
  if (value_) return value_(x);
  return jet(x, 0).value();
}

Jet ScalarField::jet(std::span<const double> x, int order) const {
  auto vars = Jet::variables(x, order);
  return eval(vars);
}

double ScalarField::derivative(std::span<const double> x, const MultiIndex& alpha) const {
  if (alpha.order() == 0) return value(x);
  if (kind_ == DerivativeKind::finite_difference) return fd_partial(*this, x, alpha, fd_step(x));
  return jet(x, alpha.order()).derivative(alpha);
}

Jet ScalarField::eval(std::span<const Jet> x) const {
  if (kind_ == DerivativeKind::exact) return jet_(x);
  // Finite-difference lift: Taylor coefficients at the base point, then compose.
  Point x0(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) x0[i] = x[i].value();
  const int p = x[0].layout().order();
  const JetLayout& outer = JetLayout::get(n_, p);
  std::vector<double> coeffs(outer.size());
  const double h = fd_step(x0);
  coeffs[0] = value_(x0);
  for (std::size_t k = 1; k < outer.size(); ++k)
    coeffs[k] = fd_partial(*this, x0, outer.index(k), h) / outer.index(k).factorial();
  return compose_taylor(x, coeffs);
}

double ScalarField::fd_step(std::span<const double> x) const {
  if (step_) return step_(x);
  double r = 0.0;
  for (double v : x) r = std::max(r, std::abs(v));
  return 1e-3 * std::max(1.0, r);
}

double fd_step_for_distance(double dist_to_w) {
  if (!std::isfinite(dist_to_w)) return 1e-3;
  return std::max(1e-6, 1e-3 * dist_to_w);
}

namespace {

double central_difference(const ScalarField& f, std::span<const double> x, const MultiIndex& alpha, double step) {

  // Tensor product of 1-D central stencils: offsets (k/2 - j)h with weights (-1)^j C(k,j).
  struct Node {
    std::vector<double> shift;
    double weight;
  };
  std::vector<Node> nodes{{std::vector<double>(x.size(), 0.0), 1.0}};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int k = alpha[i];
    if (k == 0) continue;
    std::vector<Node> next;
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      const double w = ((j % 2) ? -1.0 : 1.0) * binom;
      for (const Node& nd : nodes) {
        Node m = nd;
        m.shift[i] += (0.5 * k - j) * step;
        m.weight *= w;
        next.push_back(std::move(m));
      }
      binom = binom * (k - j) / (j + 1);
    }
    nodes = std::move(next);
  }

  double acc = 0.0;
  Point y(x.size());
  for (const Node& nd : nodes) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + nd.shift[i];
    if (!f.in_domain(y)) throw Error(ErrorCode::stencil_outside_domain, "finite-difference stencil leaves the domain");
    acc += nd.weight * f.value(y);
  }
  return acc / std::pow(step, alpha.order());
}

}  // namespace

double fd_partial(const ScalarField& f, std::span<const double> x, const MultiIndex& alpha, double step) {
  if (alpha.order() < 1) throw Error(ErrorCode::invalid_argument, "fd_partial needs |alpha| >= 1");
  if (alpha.dim() != static_cast<int>(x.size())) throw Error(ErrorCode::invalid_argument, "fd_partial dimension mismatch");
  // One Richardson step removes the h^2 term, which makes the estimate exact on
  // polynomials of degree <= 2|alpha| for |alpha| <= 3.
  const double coarse = central_difference(f, x, alpha, step);
  const double fine = central_difference(f, x, alpha, 0.5 * step);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace regdist
