#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regdist/box.hpp"
#include "regdist/kdtree.hpp"

namespace regdist {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Evaluates d(x, S). Analytic targets are exact; sampled ones under-estimate
/// by at most covering_radius(): eval − cr ≤ d(x,S) ≤ eval.
class DistanceOracle {
 public:
  virtual ~DistanceOracle() = default;

  virtual int dim() const = 0;
  virtual double distance(std::span<const double> x) const = 0;
  virtual double covering_radius() const { return 0.0; }
  virtual bool empty() const { return false; }
  /// True when distance_jet is available wherever d(·,S) is smooth.
  virtual bool has_jets() const { return false; }
  virtual std::optional<Jet> distance_jet(std::span<const Jet> x) const;
  /// Points of S inside `box`, no two consecutive ones farther apart than `spacing`.
  virtual std::vector<Point> sample(double spacing, const Box& box) const = 0;
  virtual std::string describe() const = 0;
};

using OraclePtr = std::shared_ptr<const DistanceOracle>;

/// d(·, ∅) = +∞.
class EmptyOracle final : public DistanceOracle {
 public:
  explicit EmptyOracle(int n) : n_(n) {}
  int dim() const override { return n_; }
  double distance(std::span<const double>) const override { return kInfinity; }
  bool empty() const override { return true; }
  std::vector<Point> sample(double, const Box&) const override { return {}; }
  std::string describe() const override { return "empty"; }

 private:
  int n_;
};

/// {o + t·u : t ∈ [t0, t1]} with |u| = 1; infinite ends give rays and lines,
/// t0 == t1 gives a single point.
class LinearPieceOracle final : public DistanceOracle {
 public:
  LinearPieceOracle(Point origin, Point direction, double t0, double t1);
  static std::shared_ptr<LinearPieceOracle> point(Point p);
  static std::shared_ptr<LinearPieceOracle> segment(Point a, Point b);
  static std::shared_ptr<LinearPieceOracle> ray(Point origin, Point direction);
  static std::shared_ptr<LinearPieceOracle> line(Point origin, Point direction);

  int dim() const override { return static_cast<int>(o_.size()); }
  double distance(std::span<const double> x) const override;
  bool has_jets() const override { return true; }
  std::optional<Jet> distance_jet(std::span<const Jet> x) const override;
  std::vector<Point> sample(double spacing, const Box& box) const override;
  std::string describe() const override;

 private:
  double project(std::span<const double> x) const;
  Point o_, u_;
  double t0_, t1_;
};

/// Sphere |x − c| = r.
class SphereOracle final : public DistanceOracle {
 public:
  SphereOracle(Point center, double radius);
  int dim() const override { return static_cast<int>(c_.size()); }
  double distance(std::span<const double> x) const override;
  bool has_jets() const override { return true; }
  std::optional<Jet> distance_jet(std::span<const Jet> x) const override;
  std::vector<Point> sample(double spacing, const Box& box) const override;
  std::string describe() const override;

 private:
  Point c_;
  double r_;
};

/// Graph {(s, q(s)) : s ∈ [a, b]} of a univariate polynomial in the plane.
class PolyGraphOracle final : public DistanceOracle {
 public:
  /// coeffs[k] multiplies s^k.
  PolyGraphOracle(std::vector<double> coeffs, double a, double b);
  int dim() const override { return 2; }
  double distance(std::span<const double> x) const override;
  std::vector<Point> sample(double spacing, const Box& box) const override;
  std::string describe() const override;

 private:
  double q(double s) const;
  double dq(double s) const;
  double ddq(double s) const;
  std::vector<double> c_;
  double a_, b_;
};

/// Finite sample of a set; the sampler states how far the set may stray from it.
class PointCloudOracle final : public DistanceOracle {
 public:
  PointCloudOracle(std::vector<Point> points, double covering_radius);
  int dim() const override { return dim_; }
  double distance(std::span<const double> x) const override { return tree_.nearest(x).distance; }
  double covering_radius() const override { return cr_; }
  bool empty() const override { return points_.empty(); }
  std::vector<Point> sample(double spacing, const Box& box) const override;
  std::string describe() const override;
  const std::vector<Point>& points() const { return points_; }
  std::size_t nearest_index(std::span<const double> x) const { return tree_.nearest(x).index; }

 private:
  int dim_;
  std::vector<Point> points_;
  double cr_;
  KdTree tree_;
};

/// d(x, ∪S_i) = min_i d(x, S_i); covering radius is the max of the parts.
class UnionOracle final : public DistanceOracle {
 public:
  explicit UnionOracle(std::vector<OraclePtr> parts, int dim);
  int dim() const override { return dim_; }
  double distance(std::span<const double> x) const override;
  double covering_radius() const override;
  bool empty() const override;
  bool has_jets() const override;
  std::optional<Jet> distance_jet(std::span<const Jet> x) const override;
  std::vector<Point> sample(double spacing, const Box& box) const override;
  std::string describe() const override;
  const std::vector<OraclePtr>& parts() const { return parts_; }

 private:
  std::vector<OraclePtr> parts_;
  int dim_;
};

OraclePtr make_union(std::vector<OraclePtr> parts, int dim);

/// x ↦ d(x, S) as a field: exact jets when the oracle has them, finite
/// differences with the distance-scaled step policy otherwise.
ScalarField distance_field(const OraclePtr& oracle);

enum class Verdict { in, out, ambiguous };
const char* verdict_name(Verdict v);

/// Membership of x in G_η(Z, W) = {x ∉ W : d(x,Z) < η·d(x,W)} with explicit
/// sampling margins.
Verdict g_eta_contains(const DistanceOracle& Z, const DistanceOracle& W, double eta, std::span<const double> x);
/// Same, with d(x, W) already evaluated.
Verdict g_eta_verdict(double dz, double cr_z, double dw, double cr_w, double eta);

/// ε + η + εη: G_ε(G_η(Z)) ⊂ G_{ε+η+εη}(Z).
double g_eta_compose_bound(double eps, double eta);

double hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b);
/// sup_{x∈a} d(x, b)
double directed_hausdorff(const std::vector<Point>& a, const KdTree& b);

}  // namespace regdist
