#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace regdist {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);

  static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(n), 0)); }
  static MultiIndex unit(int n, int axis);

  const std::vector<int>& entries() const { return entries_; }
  int operator[](std::size_t i) const { return entries_[i]; }
  int dim() const { return static_cast<int>(entries_.size()); }
  int order() const { return order_; }

  /// α! = Π α_i!
  double factorial() const;
  std::string str() const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<int> entries_;
  int order_ = 0;
};

/// All α ∈ ℕ^n with |α| ≤ p, graded by order, lexicographic within a grade.
std::vector<MultiIndex> multi_index_enumerate(int n, int p);

/// Index layout shared by every jet in n variables truncated at order p.
/// Instances are interned and immutable, so jets can hold a raw pointer.
class JetLayout {
 public:
  static const JetLayout& get(int n, int p);

  int dim() const { return n_; }
  int order() const { return p_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& index(std::size_t k) const { return indices_[k]; }
  /// Position of α in indices(), or npos if |α| > p.
  std::size_t find(const MultiIndex& alpha) const;
  /// Position of the first-order index e_axis.
  std::size_t unit(int axis) const { return units_[static_cast<std::size_t>(axis)]; }

  struct Term {
    std::uint32_t a, b, out;
  };
  /// Every (i, j) whose index sum stays within order p, with the slot it lands in.
  const std::vector<Term>& product_terms() const { return terms_; }
  /// Offset of the first index of each grade; grade_start(p+1) == size().
  std::size_t grade_start(int q) const { return grade_start_[static_cast<std::size_t>(q)]; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  JetLayout(int n, int p);
  std::size_t key(const std::vector<int>& e) const;

  int n_, p_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> units_;
  std::vector<std::size_t> grade_start_;
  std::vector<Term> terms_;
  std::vector<std::size_t> lookup_;  // dense (p+1)^n table
};

}  // namespace regdist
