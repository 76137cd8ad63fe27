#include "regdist/multi_index.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

#include "regdist/error.hpp"

namespace regdist {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    if (e < 0) throw Error(ErrorCode::invalid_argument, "negative multi-index entry");
  }
  order_ = std::accumulate(entries_.begin(), entries_.end(), 0);
}

MultiIndex MultiIndex::unit(int n, int axis) {
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  e[static_cast<std::size_t>(axis)] = 1;
  return MultiIndex(std::move(e));
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int e : entries_)
    for (int k = 2; k <= e; ++k) f *= k;
  return f;
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < entries_.size(); ++i) os << (i ? "," : "") << entries_[i];
  os << ')';
  return os.str();
}

namespace {

// Lexicographic enumeration of compositions of q into n parts.
void compositions(int n, int q, std::vector<int>& cur, std::size_t pos, std::vector<MultiIndex>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = q;
    out.emplace_back(cur);
    return;
  }
  for (int k = 0; k <= q; ++k) {
    cur[pos] = k;
    compositions(n, q - k, cur, pos + 1, out);
  }
}

}  // namespace

std::vector<MultiIndex> multi_index_enumerate(int n, int p) {
  if (n < 1 || p < 0) throw Error(ErrorCode::invalid_argument, "multi_index_enumerate needs n >= 1, p >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  for (int q = 0; q <= p; ++q) compositions(n, q, cur, 0, out);
  return out;
}

JetLayout::JetLayout(int n, int p) : n_(n), p_(p), indices_(multi_index_enumerate(n, p)) {
  std::size_t table = 1;
  for (int i = 0; i < n; ++i) table *= static_cast<std::size_t>(p + 1);
  lookup_.assign(table, npos);
  for (std::size_t k = 0; k < indices_.size(); ++k) lookup_[key(indices_[k].entries())] = k;

  grade_start_.assign(static_cast<std::size_t>(p + 2), indices_.size());
  for (std::size_t k = indices_.size(); k-- > 0;)
    grade_start_[static_cast<std::size_t>(indices_[k].order())] = k;
  for (int q = p; q >= 0; --q)
    grade_start_[static_cast<std::size_t>(q)] =
        std::min(grade_start_[static_cast<std::size_t>(q)], grade_start_[static_cast<std::size_t>(q + 1)]);

  for (int axis = 0; axis < n; ++axis)
    units_.push_back(p >= 1 ? find(MultiIndex::unit(n, axis)) : npos);

  std::vector<int> sum(static_cast<std::size_t>(n));
  for (std::size_t a = 0; a < indices_.size(); ++a) {
    for (std::size_t b = 0; b < indices_.size(); ++b) {
      if (indices_[a].order() + indices_[b].order() > p) continue;
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = indices_[a][i] + indices_[b][i];
      terms_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                        static_cast<std::uint32_t>(lookup_[key(sum)])});
    }
  }
}

std::size_t JetLayout::key(const std::vector<int>& e) const {
  std::size_t k = 0;
  for (int v : e) k = k * static_cast<std::size_t>(p_ + 1) + static_cast<std::size_t>(v);
  return k;
}

std::size_t JetLayout::find(const MultiIndex& alpha) const {
  if (alpha.dim() != n_ || alpha.order() > p_) return npos;
  return lookup_[key(alpha.entries())];
}

const JetLayout& JetLayout::get(int n, int p) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, p}];
  if (!slot) slot.reset(new JetLayout(n, p));
  return *slot;
}

}  // namespace regdist
