#include "regdist/poly.hpp"

#include <cmath>
#include <memory>

#include "regdist/error.hpp"

namespace regdist {

Poly::Poly(int n, std::vector<double> coeffs) : n_(n), coeffs_(std::move(coeffs)) {
  if (n < 0) throw Error(ErrorCode::invalid_argument, "negative polynomial dimension");
  if (n == 0) {
    if (coeffs_.size() != 1) throw Error(ErrorCode::invalid_argument, "a polynomial in 0 variables is one constant");
    return;
  }
  for (int d = 0;; ++d) {
    const std::size_t count = JetLayout::get(n, d).size();
    if (count == coeffs_.size()) {
      degree_ = d;
      break;
    }
    if (count > coeffs_.size())
      throw Error(ErrorCode::invalid_argument, "coefficient count " + std::to_string(coeffs_.size()) +
                                                   " is not C(n+d,d) for n=" + std::to_string(n));
  }
}

Poly Poly::constant(int n, double c) {
  if (n == 0) return Poly(0, {c});
  return Poly(n, {c});
}

bool Poly::affine() const { return degree_ <= 1; }

std::pair<double, std::vector<double>> Poly::affine_parts() const {
  std::vector<double> grad(static_cast<std::size_t>(n_), 0.0);
  if (degree_ >= 1) {
    const JetLayout& L = JetLayout::get(n_, degree_);
    for (int i = 0; i < n_; ++i) grad[static_cast<std::size_t>(i)] = coeffs_[L.unit(i)];
  }
  return {coeffs_[0], grad};
}

double Poly::value(std::span<const double> x) const {
  if (n_ == 0) return coeffs_[0];
  const JetLayout& L = JetLayout::get(n_, degree_);
  double s = 0.0;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (coeffs_[k] == 0.0) continue;
    double t = coeffs_[k];
    const MultiIndex& a = L.index(k);
    for (int i = 0; i < n_; ++i)
      for (int e = 0; e < a[static_cast<std::size_t>(i)]; ++e) t *= x[static_cast<std::size_t>(i)];
    s += t;
  }
  return s;
}

Jet Poly::eval(std::span<const Jet> x) const {
  const JetLayout& layout = x[0].layout();
  if (n_ == 0) return Jet(layout, coeffs_[0]);
  const JetLayout& L = JetLayout::get(n_, degree_);
  Jet s(layout, 0.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (coeffs_[k] == 0.0) continue;
    const MultiIndex& a = L.index(k);
    Jet t(layout, coeffs_[k]);
    for (int i = 0; i < n_; ++i)
      if (a[static_cast<std::size_t>(i)] > 0) t = t * pow(x[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(i)]);
    s += t;
  }
  return s;
}

ScalarField Poly::field() const {
  auto self = std::make_shared<const Poly>(*this);
  return ScalarField::exact(
      n_, [self](std::span<const Jet> x) { return self->eval(x); },
      [self](std::span<const double> x) { return self->value(x); });
}

}  // namespace regdist
