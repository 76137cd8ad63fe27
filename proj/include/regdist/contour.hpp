#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "regdist/box.hpp"

namespace regdist {

/// Polyline approximation of {f = level}. Every point satisfies
/// |f − level| ≤ tol or sits on a bracket narrower than 1e-14·diam.
struct Contour {
  std::vector<Point> points;
  std::vector<std::array<std::size_t, 2>> segments;
  double pitch = 0.0;
};

using ValueFn = std::function<double(std::span<const double>)>;

/// Sign-change bracketing with bisection for n = 1, marching squares with
/// bisection on every crossing edge for n = 2.
Contour extract_contour(const ValueFn& f, double level, const Box& box, int resolution, double tol = 1e-9);

/// Bisection on the segment [a, b], assuming f − level changes sign.
Point bisect_crossing(const ValueFn& f, double level, Point a, Point b, double fa, double tol);

}  // namespace regdist
