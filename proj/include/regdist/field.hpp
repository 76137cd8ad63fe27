#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "regdist/jet.hpp"

namespace regdist {

using Point = std::vector<double>;

enum class DerivativeKind { exact, finite_difference };

/// A real function on (a subset of) ℝⁿ whose partials up to any order can be
/// queried. Exact fields propagate Taylor jets; finite-difference fields only
/// evaluate values and lift to jets through fd_partial.
class ScalarField {
 public:
  using JetFn = std::function<Jet(std::span<const Jet>)>;
  using ValueFn = std::function<double(std::span<const double>)>;
  using DomainFn = std::function<bool(std::span<const double>)>;
  using StepFn = std::function<double(std::span<const double>)>;

  ScalarField() = default;

  static ScalarField from_jet(int n, JetFn f, DomainFn domain = {});
  /// `value` is an optional fast path; it must agree with f on order-0 jets.
  static ScalarField exact(int n, JetFn f, ValueFn value, DomainFn domain = {});
  static ScalarField from_values(int n, ValueFn f, StepFn step, DomainFn domain = {});
  static ScalarField constant(int n, double c);
  static ScalarField coordinate(int n, int axis);

  int dim() const { return n_; }
  DerivativeKind kind() const { return kind_; }
  bool valid() const { return static_cast<bool>(value_) || static_cast<bool>(jet_); }

  double value(std::span<const double> x) const;
  double operator()(std::span<const double> x) const { return value(x); }
  double derivative(std::span<const double> x, const MultiIndex& alpha) const;
  /// Taylor jet at x in the n coordinate variables, truncated at `order`.
  Jet jet(std::span<const double> x, int order) const;
  /// Composition with arbitrary inner jets (one per coordinate).
  Jet eval(std::span<const Jet> x) const;

  bool in_domain(std::span<const double> x) const { return !domain_ || domain_(x); }
  const DomainFn& domain() const { return domain_; }
  /// Base step for finite differences at x (only meaningful for FD fields).
  double fd_step(std::span<const double> x) const;

 private:
  int n_ = 0;
  DerivativeKind kind_ = DerivativeKind::exact;
  JetFn jet_;
  ValueFn value_;
  DomainFn domain_;
  StepFn step_;
};

/// max(1e-6, 1e-3·d): stencils shrink with the distance to the singular set.
double fd_step_for_distance(double dist_to_w);

/// Iterated central differences for D^α f(x) with one Richardson step; the
/// stencil reaches |α|·step/2.
double fd_partial(const ScalarField& f, std::span<const double> x, const MultiIndex& alpha, double step);

}  // namespace regdist
