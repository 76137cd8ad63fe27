#include "regdist/box.hpp"

#include <cmath>

#include "regdist/error.hpp"

namespace regdist {

bool Box::contains(std::span<const double> x, double tol) const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  return true;
}

double Box::diameter() const {
  double s = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  return std::sqrt(s);
}

double Box::pitch(int resolution, int axis) const {
  if (resolution < 2) throw Error(ErrorCode::empty_grid, "lattice resolution must be >= 2");
  const auto a = static_cast<std::size_t>(axis);
  return (hi[a] - lo[a]) / (resolution - 1);
}

std::vector<Point> Box::lattice(int resolution) const {
  if (resolution < 2) throw Error(ErrorCode::empty_grid, "lattice resolution must be >= 2");
  const std::size_t n = lo.size();
  std::vector<Point> out;
  std::vector<int> idx(n, 0);
  while (true) {
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (resolution - 1);
    out.push_back(std::move(p));
    std::size_t k = 0;
    while (k < n && ++idx[k] == resolution) idx[k++] = 0;
    if (k == n) break;
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace regdist
