#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "regdist/field.hpp"

namespace regdist {

/// Static kd-tree over a point set, used for nearest-neighbour distances.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(const std::vector<Point>& points);

  bool empty() const { return n_points_ == 0; }
  std::size_t size() const { return n_points_; }
  int dim() const { return dim_; }
  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)}; }

  struct Hit {
    std::size_t index;
    double distance;
  };
  /// Nearest point; distance is +inf on an empty tree.
  Hit nearest(std::span<const double> x) const;

 private:
  struct Node {
    std::size_t begin, end;  // range into order_
    int axis;
    double split;
    int left = -1, right = -1;
  };
  int build(std::size_t begin, std::size_t end, int depth);
  void search(int node, std::span<const double> x, Hit& best, double& best2) const;

  int dim_ = 0;
  std::size_t n_points_ = 0;
  std::vector<double> coords_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace regdist
