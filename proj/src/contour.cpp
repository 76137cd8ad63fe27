#include "regdist/contour.hpp"

#include <cmath>
#include <map>

#include "regdist/error.hpp"

namespace regdist {

Point bisect_crossing(const ValueFn& f, double level, Point a, Point b, double fa, double tol) {
  const bool a_above = fa > level;
  Point m(a.size());
  for (int it = 0; it < 200; ++it) {
    for (std::size_t i = 0; i < a.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
    const double fm = f(m);
    if (std::abs(fm - level) <= tol && dist(a, b) < 1e-6) return m;
    if ((fm > level) == a_above) a = m;
    else b = m;
    if (dist(a, b) <= 1e-15 * (1.0 + norm2(a))) break;
  }
  return m;
}

namespace {

Contour contour_1d(const ValueFn& f, double level, const Box& box, int res, double tol) {
  Contour c;
  c.pitch = box.pitch(res);
  auto nodes = box.lattice(res);
  std::vector<double> v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) v[i] = f(nodes[i]);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if ((v[i] > level) != (v[i + 1] > level)) c.points.push_back(bisect_crossing(f, level, nodes[i], nodes[i + 1], v[i], tol));
  }
  return c;
}

Contour contour_2d(const ValueFn& f, double level, const Box& box, int res, double tol) {
  Contour c;
  c.pitch = std::max(box.pitch(res, 0), box.pitch(res, 1));
  const double hx = box.pitch(res, 0), hy = box.pitch(res, 1);
  auto node = [&](int i, int j) { return Point{box.lo[0] + hx * i, box.lo[1] + hy * j}; };
  std::vector<double> v(static_cast<std::size_t>(res) * static_cast<std::size_t>(res));
  auto at = [&](int i, int j) -> double& { return v[static_cast<std::size_t>(j) * static_cast<std::size_t>(res) + static_cast<std::size_t>(i)]; };
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) at(i, j) = f(node(i, j));

  // crossing points are shared between the two cells adjacent to an edge
  std::map<std::array<int, 3>, std::size_t> edge_point;
  auto crossing = [&](int i0, int j0, int i1, int j1) -> long {
    const double a = at(i0, j0), b = at(i1, j1);
    if ((a > level) == (b > level)) return -1;
    std::array<int, 3> key{std::min(i0, i1), std::min(j0, j1), i0 == i1 ? 1 : 0};
    auto it = edge_point.find(key);
    if (it != edge_point.end()) return static_cast<long>(it->second);
    c.points.push_back(bisect_crossing(f, level, node(i0, j0), node(i1, j1), a, tol));
    edge_point[key] = c.points.size() - 1;
    return static_cast<long>(c.points.size() - 1);
  };

  for (int j = 0; j + 1 < res; ++j) {
    for (int i = 0; i + 1 < res; ++i) {
      // edges in cyclic order: bottom, right, top, left
      long e[4] = {crossing(i, j, i + 1, j), crossing(i + 1, j, i + 1, j + 1), crossing(i, j + 1, i + 1, j + 1),
                   crossing(i, j, i, j + 1)};
      std::vector<long> hit;
      for (long k : e)
        if (k >= 0) hit.push_back(k);
      if (hit.size() == 2) {
        c.segments.push_back({static_cast<std::size_t>(hit[0]), static_cast<std::size_t>(hit[1])});
      } else if (hit.size() == 4) {
        // saddle: decide the pairing by the cell-centre value
        const double centre = f(Point{box.lo[0] + hx * (i + 0.5), box.lo[1] + hy * (j + 0.5)});
        const bool corner_above = at(i, j) > level;
        if ((centre > level) == corner_above) {
          c.segments.push_back({static_cast<std::size_t>(e[0]), static_cast<std::size_t>(e[1])});
          c.segments.push_back({static_cast<std::size_t>(e[2]), static_cast<std::size_t>(e[3])});
        } else {
          c.segments.push_back({static_cast<std::size_t>(e[0]), static_cast<std::size_t>(e[3])});
          c.segments.push_back({static_cast<std::size_t>(e[1]), static_cast<std::size_t>(e[2])});
        }
      }
    }
  }
  return c;
}

}  // namespace

Contour extract_contour(const ValueFn& f, double level, const Box& box, int resolution, double tol) {
  if (box.dim() == 1) return contour_1d(f, level, box, resolution, tol);
  if (box.dim() == 2) return contour_2d(f, level, box, resolution, tol);
  throw Error(ErrorCode::unsupported_dimension, "contours are extracted in dimensions 1 and 2 only");
}

}  // namespace regdist
