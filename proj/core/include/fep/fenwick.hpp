#pragma once

#include <cstddef>
#include <vector>

namespace fep {

/// Binary indexed tree over non-negative weights with O(log n) update and
/// inverse-CDF lookup.
class FenwickTree {
 public:
  FenwickTree() = default;
  explicit FenwickTree(std::size_t size) : tree_(size + 1, 0.0), values_(size, 0.0) {
    if (size > 0) top_ = 1;
    while (top_ * 2 <= size) top_ *= 2;
  }

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double value(std::size_t i) const noexcept { return values_[i]; }

  void set(std::size_t i, double v) noexcept {
    const double delta = v - values_[i];
    if (delta == 0.0) return;
    values_[i] = v;
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
  }

  /// Sum of all weights, as maintained incrementally.
  [[nodiscard]] double total() const noexcept {
    double s = 0.0;
    for (std::size_t k = size(); k > 0; k -= k & (~k + 1)) s += tree_[k];
    return s;
  }

  /// Smallest index i whose inclusive prefix sum exceeds `target`.
  /// `target` must lie in [0, total()); the result is clamped to the last
  /// index with positive weight to absorb rounding at the top end.
  [[nodiscard]] std::size_t find(double target) const noexcept {
    const std::size_t n = size();
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      // Written as selects so the descent compiles without data-dependent branches.
      const bool inside = next <= n;
      const double w = tree_[inside ? next : 0];
      const bool take = inside && w <= target;
      pos = take ? next : pos;
      target -= take ? w : 0.0;
    }
    while (pos < n && values_[pos] <= 0.0) {
      if (pos + 1 == n) break;
      ++pos;
    }
    while (pos > 0 && values_[pos] <= 0.0) --pos;
    return pos;
  }

  /// Recomputes the internal sums from the stored weights.
  void rebuild() noexcept {
    for (auto& t : tree_) t = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      std::size_t k = i + 1;
      tree_[k] += values_[i];
      const std::size_t parent = k + (k & (~k + 1));
      if (parent < tree_.size()) tree_[parent] += tree_[k];
    }
  }

 private:
  std::vector<double> tree_;
  std::vector<double> values_;
  std::size_t top_ = 0;  // largest power of two <= size
};

}  // namespace fep
