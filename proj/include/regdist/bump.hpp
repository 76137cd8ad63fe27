#pragma once

#include <string>
#include <vector>

#include "regdist/cells.hpp"
#include "regdist/regular.hpp"

namespace regdist {

/// Constants of one bump. For graph cells every strict inequality carries a
/// 0.9 safety factor.
struct BumpConstants {
  double eta = 0.0;
  double eta_prime = 0.0;  // scale of the boundary bump λ
  double rho_prime = 0.0;  // plateau of λ
  double delta = 0.0;      // slab escape
  double gamma = 0.0;
  double rho = 0.0;  // plateau of the bump
  double L = 1.0;

  /// 0 < ρ < η, 0 < γ < 3(ρ′δ)²/(2(1+ρ′δ)²), ρ < ρ′δ, ρ < L√γ/(√3+√γ), 0 < δ < L, 0 < η < L.
  CertificateReport check(const std::string& stage = "bump_constants") const;
};

/// δ = L/2, γ = 0.9·3(ρ′δ)²/(2(1+ρ′δ)²), ρ = 0.9·min{ρ′δ, L√γ/(√3+√γ)}.
/// Throws EtaTooLarge when η ≥ L.
BumpConstants graph_bump_constants(double L, double eta, double rho_prime);

/// ψ with ψ = 1 on G_ρ(Z,W), supp ψ ⊂ G_η(Z,W), 0 ≤ ψ ≤ 1.
struct BumpFunction {
  RegularFunction psi;
  OraclePtr Z;
  BumpConstants c;
  double rho = 0.0;
  double eta = 0.0;
  std::string target;

  double value(std::span<const double> x) const { return psi.field.value(x); }
};

/// Radial bump around z ∉ W.
BumpFunction bump_point(const Point& z, const OraclePtr& W, double eta, int p);

/// Graph stratum: x ↦ P(|w − φ(u)|²/(γ·d((u,φ(u)),W)²)) on the slab T×ℝ^{n−m}, 0 off it.
/// Certificate from the product/reciprocal/compose chain, with the Λ(W)
/// constants of w − φ(u) and d((u,φ(u)),W) fitted near the graph.
RegularFunction graph_plateau_term(const ValidatedStratification& ctx, std::size_t index, double gamma, int p);

/// Bump of stratum `index` of a validated stratification, built by recursion
/// on the lower-dimensional strata of ∂Z \ W.
BumpFunction bump_cell(const ValidatedStratification& ctx, std::size_t index, double eta, int p);
BumpFunction bump_open_cell(const ValidatedStratification& ctx, std::size_t index, double eta, int p);
/// Dispatches on the cell kind.
BumpFunction bump_stratum(const ValidatedStratification& ctx, std::size_t index, double eta, int p);

/// 1 − P(ψ₁ + … + ψ_k). Plateau min ρ_i, support η. Throws MixedReference when
/// W or η differ.
BumpFunction bump_union(const std::vector<BumpFunction>& bumps);

/// Checks the bump on the given points: 0 ≤ ψ ≤ 1, ψ = 1 on `in` samples of
/// G_ρ(Z,W), ψ = 0 on `out` samples of G_η(Z,W).
CertificateReport bump_check(const BumpFunction& b, const OraclePtr& W, const std::vector<Point>& points);

/// Λ_p^0(W) partition of unity subordinate to the strata.
///
/// Built as a tower over the dimension-ordered strata: T_0 = 0,
/// T_i = T_{i−1} + (1 − T_{i−1})·q_i with q_i the plateau term of a graph
/// stratum or the indicator of an open one, ψ_i = T_i − T_{i−1} and
/// ω_i = ψ_i / Σψ_j.
struct Partition {
  std::vector<RegularFunction> omega;
  std::vector<RegularFunction> q;
  std::vector<BumpConstants> constants;
  std::vector<double> eta;  // support scale per stratum
  std::vector<double> rho;  // plateau scale per stratum
  CertificateReport report;

  std::size_t size() const { return omega.size(); }
  /// Σψ_j at x.
  double denominator(std::span<const double> x) const;
};

/// Floor for Σψ_j on the grid; below it the strata leave a gap.
inline constexpr double kPositivityFloor = 0.5;

/// eta[i] is the support scale of stratum i (in the validated order).
/// Throws CoverageGap when Σψ_j < 0.5 at a grid point off W.
Partition partition_of_unity(const ValidatedStratification& ctx, const std::vector<double>& eta, int p);
Partition partition_of_unity(const ValidatedStratification& ctx, double eta, int p);

/// Σω_i = 1, 0 ≤ ω_i ≤ 1 and supp ω_i ⊂ G_{η_i}(C_i, W) on the points.
CertificateReport partition_check(const Partition& part, const ValidatedStratification& ctx,
                                  const std::vector<Point>& points);

}  // namespace regdist
