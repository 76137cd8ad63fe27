#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regdist/field.hpp"

namespace regdist {

/// Polynomial in n variables; coefficients follow multi_index_enumerate(n, degree).
class Poly {
 public:
  Poly() = default;
  /// Degree is inferred from the coefficient count, which must be C(n+d, d).
  Poly(int n, std::vector<double> coeffs);
  static Poly constant(int n, double c);

  int dim() const { return n_; }
  int degree() const { return degree_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  bool affine() const;

  double value(std::span<const double> x) const;
  Jet eval(std::span<const Jet> x) const;
  ScalarField field() const;
  /// Constant part and gradient of an affine polynomial.
  std::pair<double, std::vector<double>> affine_parts() const;

  friend bool operator==(const Poly&, const Poly&) = default;

 private:
  int n_ = 0, degree_ = 0;
  std::vector<double> coeffs_;
};

}  // namespace regdist
