#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "regdist/distance.hpp"
#include "regdist/poly.hpp"
#include "regdist/report.hpp"

namespace regdist {

/// Sampling region and lattice density; cells use it to build boundary samples
/// and validators use it as the probe grid.
struct GridSpec {
  Box box;
  int resolution = 64;
  double collar = 1e-3;
  int refine = 0;
  unsigned seed = 1;

  std::vector<Point> lattice() const { return box.lattice(resolution); }
  double pitch() const;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// A real function on a cell's base coordinates, polynomial when known.
struct CellFunction {
  ScalarField field;
  std::optional<Poly> poly;

  static CellFunction of(Poly p);
  static CellFunction of(ScalarField f);
  double value(std::span<const double> u) const;
  Jet eval(std::span<const Jet> u) const;
  bool affine() const { return poly && poly->affine(); }
};

/// ψ₁ or ψ₂ of an open cell: ±∞ or a function of the base coordinates.
struct CellBound {
  int infinite = 0;  // -1 for −∞, +1 for +∞, 0 when finite
  CellFunction fn;

  static CellBound minus_infinity() { return {-1, {}}; }
  static CellBound plus_infinity() { return {1, {}}; }
  static CellBound of(CellFunction f) { return {0, std::move(f)}; }
  double value(std::span<const double> u) const;
};

enum class CellKind { open, graph, region };
const char* cell_kind_name(CellKind k);

/// Λ_p-regular cell. Coordinates are permuted first: local y_k = x_{perm[k]}.
///   open:   ψ₁(y') < y_n < ψ₂(y') over an open base cell in ℝ^{n−1}
///   graph:  y'' = φ(y') over an open base cell T ⊂ ℝ^m (a point when m = 0)
///   region: {q_i > 0} for polynomials q_i, an open set given by sign conditions
class Cell {
 public:
  static std::shared_ptr<const Cell> open(int n, std::shared_ptr<const Cell> base, CellBound lower, CellBound upper,
                                          double lipschitz_M, std::vector<int> perm, const GridSpec& sampling);
  static std::shared_ptr<const Cell> graph(int n, std::shared_ptr<const Cell> base, std::vector<CellFunction> phi,
                                           double lipschitz_M, std::vector<int> perm, const GridSpec& sampling);
  static std::shared_ptr<const Cell> region(int n, std::vector<Poly> positive, const GridSpec& sampling);
  /// Open interval (a, b) ⊂ ℝ, the usual base of planar cells.
  static std::shared_ptr<const Cell> interval(double a, double b, const GridSpec& sampling);

  int ambient_dim() const { return n_; }
  int dim() const { return m_; }
  CellKind kind() const { return kind_; }
  const std::vector<int>& perm() const { return perm_; }
  double lipschitz_M() const { return lipschitz_M_; }
  double L() const { return L_; }
  const std::shared_ptr<const Cell>& base() const { return base_; }
  const CellBound& lower() const { return lower_; }
  const CellBound& upper() const { return upper_; }
  const std::vector<CellFunction>& phi() const { return phi_; }
  const std::vector<Poly>& positive() const { return positive_; }
  /// Number of base coordinates: m for graphs, n − 1 for open cells, n for regions.
  int base_dim() const;

  Point to_local(std::span<const double> x) const;
  Point to_global(std::span<const double> y) const;

  bool contains(std::span<const double> x, double tol = 0.0) const;
  /// Base membership of the local base coordinates u.
  bool base_contains(std::span<const double> u) const;
  /// d(u, ∂T) on the base; +∞ when the base is all of ℝ^m or a point.
  double base_boundary_distance(std::span<const double> u) const;

  /// Graph cells: (u, φ(u)) for the base part u of x, in global coordinates.
  Point graph_point(std::span<const double> x) const;
  /// Graph cells: true when the base part of x lies in T.
  bool in_slab(std::span<const double> x) const;
  /// Jets of the local coordinates w − φ(u) (graph cells).
  std::vector<Jet> graph_offset(std::span<const Jet> x) const;
  /// Jets of (u, φ(u)) in global coordinates (graph cells).
  std::vector<Jet> graph_point_jet(std::span<const Jet> x) const;

  const OraclePtr& boundary() const { return boundary_; }
  const OraclePtr& closure() const { return closure_; }
  const std::vector<Point>& boundary_samples() const { return boundary_samples_; }
  /// Points of the cell on the sampling lattice (graph cells: lifted base lattice).
  std::vector<Point> samples(const GridSpec& grid) const;

  std::string describe() const;

 private:
  Cell() = default;
  void build_oracles(const GridSpec& sampling);
  void build_open_boundary(const GridSpec& sampling);
  void build_graph_oracles(const GridSpec& sampling);
  void build_region_boundary(const GridSpec& sampling);

  int n_ = 0, m_ = 0;
  CellKind kind_ = CellKind::open;
  std::vector<int> perm_;
  double lipschitz_M_ = 0.0, L_ = 1.0;
  std::shared_ptr<const Cell> base_;
  CellBound lower_, upper_;
  std::vector<CellFunction> phi_;
  std::vector<Poly> positive_;
  OraclePtr boundary_, closure_;
  std::vector<Point> boundary_samples_;
};

using CellPtr = std::shared_ptr<const Cell>;

/// 1/√(1+M²)
double lip_to_L(double M);

/// Checks the Λ_p bounds |D^α ψ(u)| ≤ M̂·d(u,∂T)^{1−|α|} of the cell's defining
/// functions on the base lattice and the declared Lipschitz constant on pairs.
/// Notes: "validate_cell/M_hat", "validate_cell/lipschitz_observed".
CertificateReport validate_cell(const Cell& cell, int p, const GridSpec& grid);

struct ComposedMap {
  ScalarField field;  // u ↦ g(u, φ(u)) on the base coordinates
  CertificateReport report;
  double B = 0.0;  // fitted Λ_p constant w.r.t. d(u, ∂T)
};

/// Checks L|w − φ(u)| ≤ d(x,Z) ≤ |w − φ(u)| for x over the base, and
/// d(x,Z) ≥ L·d(x,∂Z) outside the slab; Z is the graph cell's distance oracle.
CertificateReport cell_distance_envelope_check(const Cell& cell, const DistanceOracle& Z, std::span<const double> x);

/// g∘(id, φ) on a graph cell's base with its fitted Λ_p constant.
ComposedMap graph_compose_g(const Cell& cell, const ScalarField& g, int p, const GridSpec& grid);

/// x ↦ g(u, φ(u)) on ℝⁿ, constant along the fibres of a graph cell.
ScalarField lift_through_graph(const CellPtr& cell, const ScalarField& g);

/// Fitted constant B with |D^α g(x)| ≤ B·d(x,∂C)^{1−|α|} over lattice points of an
/// open or region cell at distance > collar from W.
double fit_open_regularity(const Cell& cell, const ScalarField& g, const DistanceOracle& W, int p, const GridSpec& grid,
                           CertificateReport* report = nullptr);

struct Stratum {
  std::string id;
  CellPtr cell;
};

struct Stratification {
  OraclePtr W;
  std::vector<Stratum> strata;
  int n = 0;

  std::vector<int> dims() const;
  /// Index of the stratum containing x (tolerance for graph strata), or -1.
  int locate(std::span<const double> x, double tol = 1e-9) const;
};

struct StratumFit {
  double M_hat = 0.0;           // defining functions
  double B_g = 0.0;             // g along the stratum
  double B_w = 0.0;             // d(·, W) along a graph stratum
  std::vector<std::size_t> boundary_strata;  // strata making up ∂S \ W
};

/// Stratification after the numeric checks of Def. 2.3, ordered by dimension,
/// together with the fitted constants later stages rely on.
struct ValidatedStratification {
  Stratification s;
  std::vector<StratumFit> fits;
  CertificateReport report;
  GridSpec grid;
  int p = 0;
  ScalarField g;
  double A = 1.0;  // Lipschitz constant of g

  bool ok() const { return report.verdict() != Outcome::fail; }
};

/// Orders strata by dimension (stable), checks coverage, disjointness and the
/// frontier condition on the grid, validates every cell and fits the
/// regularity constants of g and d(·, W) along the strata.
ValidatedStratification validate_stratification(Stratification s, int p, const GridSpec& grid, ScalarField g, double A);
/// Same with g = d(·, W), A = 1.
ValidatedStratification validate_stratification(Stratification s, int p, const GridSpec& grid);

/// Helper builders.
Stratification two_ray_stratification(const GridSpec& grid);
/// Complement of a finite point set in ℝ: the open intervals between the points.
Stratification point_set_stratification(std::vector<double> points, const GridSpec& grid);
/// Complement of the curve y = q(x) in ℝ²: the two open sides of the graph.
Stratification poly_curve_stratification(const Poly& q, const GridSpec& grid);
Stratification half_line_stratification(const GridSpec& grid);
Stratification unit_circle_stratification(const GridSpec& grid);

}  // namespace regdist
