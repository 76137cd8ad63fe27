#include "regdist/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace regdist {

namespace {
constexpr std::size_t kLeaf = 12;
}

KdTree::KdTree(const std::vector<Point>& points) {
  n_points_ = points.size();
  if (points.empty()) return;
  dim_ = static_cast<int>(points[0].size());
  coords_.reserve(points.size() * static_cast<std::size_t>(dim_));
  for (const auto& p : points) coords_.insert(coords_.end(), p.begin(), p.end());
  order_.resize(points.size());
  std::iota(order_.begin(), order_.end(), 0);
  build(0, order_.size(), 0);
}

int KdTree::build(std::size_t begin, std::size_t end, int depth) {
  Node nd{begin, end, -1, 0.0};
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(nd);
  if (end - begin <= kLeaf) return id;

  // split on the widest axis
  int axis = 0;
  double widest = -1.0;
  for (int a = 0; a < dim_; ++a) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = begin; i < end; ++i) {
      double v = coords_[order_[i] * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(a)];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) widest = hi - lo, axis = a;
  }
  (void)depth;
  std::size_t mid = begin + (end - begin) / 2;
  auto coord = [&](std::size_t idx) { return coords_[idx * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(axis)]; };
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return coord(a) < coord(b); });
  nodes_[static_cast<std::size_t>(id)].axis = axis;
  nodes_[static_cast<std::size_t>(id)].split = coord(order_[mid]);
  int l = build(begin, mid, depth + 1);
  int r = build(mid, end, depth + 1);
  nodes_[static_cast<std::size_t>(id)].left = l;
  nodes_[static_cast<std::size_t>(id)].right = r;
  return id;
}

void KdTree::search(int node, std::span<const double> x, Hit& best, double& best2) const {
  const Node& nd = nodes_[static_cast<std::size_t>(node)];
  if (nd.axis < 0) {
    for (std::size_t i = nd.begin; i < nd.end; ++i) {
      const double* p = coords_.data() + order_[i] * static_cast<std::size_t>(dim_);
      double d2 = 0.0;
      for (int a = 0; a < dim_; ++a) {
        double t = p[a] - x[static_cast<std::size_t>(a)];
        d2 += t * t;
      }
      if (d2 < best2) best2 = d2, best.index = order_[i];
    }
    return;
  }
  double diff = x[static_cast<std::size_t>(nd.axis)] - nd.split;
  int first = diff < 0 ? nd.left : nd.right;
  int second = diff < 0 ? nd.right : nd.left;
  search(first, x, best, best2);
  if (diff * diff < best2) search(second, x, best, best2);
}

KdTree::Hit KdTree::nearest(std::span<const double> x) const {
  Hit best{0, std::numeric_limits<double>::infinity()};
  if (empty()) return best;
  double best2 = std::numeric_limits<double>::infinity();
  search(0, x, best, best2);
  best.distance = std::sqrt(best2);
  return best;
}

}  // namespace regdist
