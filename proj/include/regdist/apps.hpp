#pragma once

#include <string>
#include <vector>

#include "regdist/contour.hpp"
#include "regdist/regular.hpp"

namespace regdist {

/// h = f^{p+1} off W and 0 on W (d ≤ covering radius). Evaluating h where
/// f ≤ 0 off W throws NonPositiveF.
ScalarField zero_set_function(const RegularFunction& f, int p);

/// a + t·dir for t geometric from t_max down to t_min.
std::vector<Point> approach_sequence(const Point& a, const Point& dir, double t_max, double t_min, int count);

/// Log-log slope of |D^α h| against d(x,W) for every |α| ≤ p; each passes when
/// the slope is ≥ p + 1 − |α| − 0.1. Derivatives that vanish on the whole
/// sequence count as flat. Notes "flatness/exponent/<α>".
CertificateReport flatness_check(const ScalarField& h, const DistanceOracle& W, int p,
                                 const std::vector<Point>& approach);

struct LevelSet {
  double t = 0.0;
  std::vector<Point> points;
  int resolution = 0;
  double tol = 1e-9;
};

/// Points of f^{-1}(t), n ∈ {1, 2}. Throws EmptyLevelSet without a crossing.
LevelSet level_set_extract(const ScalarField& f, double t, const Box& box, int resolution);

struct ConvergenceRow {
  double t = 0.0;
  double hausdorff = 0.0;
  int resolution = 0;
  std::size_t points = 0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::vector<std::string> warnings;  // possible critical levels
  bool converging = false;
  CertificateReport report;
};

/// d_H(H_t, W) for decreasing t. Converging when the distances do not grow by
/// more than 10% from row to row and the last one is ≤ A·t + 2·pitch.
ConvergenceTable hausdorff_convergence(const ScalarField& f, const std::vector<Point>& W_samples,
                                       const std::vector<double>& t_list, const Box& box, int resolution,
                                       double A = 1.0);

/// sup over the W samples of the distance to the contour {d(·, W) = ε}.
/// Throws EmptyContour.
double lambda_eps(const std::vector<Point>& W_samples, double eps, const Box& box, int resolution);

}  // namespace regdist
