#pragma once

#include <span>
#include <vector>

#include "regdist/field.hpp"

namespace regdist {

struct Box {
  std::vector<double> lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(std::span<const double> x, double tol = 0.0) const;
  double diameter() const;
  /// Cell-centred-free regular lattice: `resolution` nodes per axis including both faces.
  std::vector<Point> lattice(int resolution) const;
  /// Spacing of lattice(resolution) along axis i.
  double pitch(int resolution, int axis = 0) const;

  friend bool operator==(const Box&, const Box&) = default;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double dist(std::span<const double> a, std::span<const double> b);

}  // namespace regdist
