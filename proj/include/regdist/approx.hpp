#pragma once

#include <string>
#include <vector>

#include "regdist/bump.hpp"

namespace regdist {

/// θ, δ_i, η_i, ε_ij and the final η of the approximation, plus the per-stratum
/// scales of the partition built on top of them.
struct ConstantSchedule {
  double kappa = 0.0;
  double A = 1.0;
  double theta = 0.0;
  std::vector<double> L;
  std::vector<bool> open;
  std::vector<double> delta;
  std::vector<double> eta;
  std::vector<std::vector<double>> eps;  // eps[i][j] for j ≤ i
  double eta_final = 0.0;
  std::vector<double> part_eta;  // support scale of ω_i
  std::vector<double> part_rho;  // plateau scale of ω_i

  std::size_t size() const { return delta.size(); }
  /// Recomputes ε from η by ε_{i+1,j} = ε_ij + η_{i+1} + η_{i+1}ε_ij, ε_ii = η_i.
  void update_eps();
  /// Chain η_s < δ_s < … < η_1 < δ_1 < θ < 1, ε_ij < δ_j, Aθ/L_i < κ and the slab condition on graph strata.
  CertificateReport check(const std::string& stage = "schedule") const;
};

/// δ_{i+1} from η_i: 0.9·η/(1+η), and for graph strata also 0.9·Lη/(1+L(η+1)).
double next_delta(double eta, double L, bool open);

/// Throws InfeasibleSchedule when a constant is not positive.
ConstantSchedule schedule_constants(const ValidatedStratification& S, double A, double kappa);

struct DistanceBounds {
  double lo = 0.0;
  double hi = kInfinity;
};

/// The carved sets Z_1 = C_1, Z_{i+1} = C_{i+1} minus the nested neighbourhoods
/// G_{η_i}(…G_{η_j}(Z_j)…) of the earlier ones.
///
/// Z_i has no closed form; distances to it are bracketed. The lower bound uses
/// that points of Z_i lie outside the nested sets, the upper bound uses witness
/// points found by walking along C_i away from the lower strata.
class CarvedSets {
 public:
  CarvedSets(const ValidatedStratification& S, const ConstantSchedule& sched);

  std::size_t size() const { return cells_.size(); }
  DistanceBounds distance(std::size_t i, std::span<const double> x) const;
  /// x ∈ Z_i
  Verdict member(std::size_t i, std::span<const double> x) const;
  /// x ∈ G_{η_i}(G_{η_{i−1}}(…G_{η_j}(Z_j)…)) for j ≤ i
  Verdict nested(std::size_t i, std::size_t j, std::span<const double> x) const;
  /// x ∈ G_eta(Z_i)
  Verdict in_g(std::size_t i, double eta, std::span<const double> x) const;

  /// Radii that decide nested membership: below inner_ratio·d(x,W) from Z_j
  /// is inside, at or above outer_ratio·d(x,W) is outside.
  double inner_ratio(std::size_t i, std::size_t j) const;
  double outer_ratio(std::size_t i, std::size_t j) const;

  /// Grid samples of C_i not known to be carved away.
  const std::vector<Point>& samples(std::size_t i) const { return samples_[i]; }
  const ValidatedStratification& strata() const { return *S_; }
  const ConstantSchedule& schedule() const { return sched_; }

 private:
  struct Query;
  DistanceBounds distance(std::size_t i, Query& q) const;
  Verdict member(std::size_t i, Query& q) const;
  Verdict nested(std::size_t i, std::size_t j, Query& q) const;
  Verdict member_at(std::size_t i, std::span<const double> y) const;
  double witness(std::size_t i, std::span<const double> x) const;

  const ValidatedStratification* S_;
  ConstantSchedule sched_;
  std::vector<CellPtr> cells_;
  std::vector<std::vector<Point>> samples_;
};

CarvedSets carve_sets(const ValidatedStratification& S, const ConstantSchedule& sched);

/// Property (4.4): d(x, C_1 ∪ … ∪ C_i) < η_i d(x,W) puts x in one of the nested
/// sets; property (4.6): the nested sets stay inside G_{δ_j}(Z_j).
CertificateReport coverage_check(const CarvedSets& carved, const ConstantSchedule& sched, const GridSpec& grid);

/// f_i on G_{δ_i}(Z_i): g(u, φ(u)) on graph strata, g itself on open ones.
struct LocalApprox {
  std::size_t index = 0;
  RegularFunction f;
  double error_factor = 0.0;  // A·δ_i/L_i, 0 on open strata
  CertificateReport report;
};

/// Checks (4.5) and the containments (4.9)/(4.10) on samples of G_{δ_i}(Z_i);
/// throws ContainmentViolation when a sample leaves the slab or the cell.
LocalApprox local_approx(std::size_t i, const CarvedSets& carved, const ConstantSchedule& sched);

/// f = Σ f_i ω_i. Throws SupportLeak when some ω_i > 0 at a grid point known to
/// lie outside G_{δ_i}(Z_i).
RegularFunction assemble(const std::vector<LocalApprox>& locals, const Partition& part, const CarvedSets& carved,
                         CertificateReport* report = nullptr);

/// Whole pipeline for a Lipschitz g.
struct Approximation {
  ValidatedStratification S;
  ConstantSchedule schedule;
  Partition partition;
  std::vector<LocalApprox> locals;
  RegularFunction f;
  CertificateReport report;
};

Approximation approximate(const ValidatedStratification& S, double kappa);

/// Thm. 1.3 with g = d(·, W): also fits the equivalence constant A of
/// A⁻¹d ≤ f ≤ A d (claimed 1/(1−κ)) and B of |D^α f| ≤ B d^{1−|α|} on the grid.
struct RegularizedDistance {
  Approximation run;
  double A_claimed = 0.0;
  double A_fitted = 0.0;
  double B_fitted = 0.0;
  CertificateReport report;

  const RegularFunction& f() const { return run.f; }
};

RegularizedDistance regularized_distance(const Stratification& S, int p, double kappa, const GridSpec& grid);

/// A = max(f/d, d/f) and B = max |D^α f| d^{|α|−1} over grid points off the W-collar.
struct EquivalenceFit {
  double A = 0.0;
  double B = 0.0;
  std::vector<double> B_order;
  std::size_t points = 0;
};
EquivalenceFit fit_equivalence(const RegularFunction& f, const DistanceOracle& W, int p, const std::vector<Point>& pts,
                               double collar);

}  // namespace regdist
