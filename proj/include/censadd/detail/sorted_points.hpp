#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace censadd::detail {

// Row-major points re-ordered by their first coordinate. Candidates for a
// compactly supported kernel centred at x are the rows whose first
// coordinate lies within `radius` of x[0].
class SortedPoints
{
public:
  SortedPoints() = default;

  SortedPoints(std::span<const double> rows, std::size_t d)
    : d_(d)
  {
    const std::size_t n = rows.size() / d;
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{ 0 });
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return rows[a * d] < rows[b * d];
    });
    points_.resize(rows.size());
    keys_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::copy_n(rows.data() + order_[k] * d, d, points_.data() + k * d);
      keys_[k] = points_[k * d];
    }
  }

  std::size_t size() const { return keys_.size(); }
  std::size_t dim() const { return d_; }

  // [first, last) positions whose first coordinate is within radius of x0
  std::pair<std::size_t, std::size_t> window(double x0, double radius) const
  {
    const auto lo = std::lower_bound(keys_.begin(), keys_.end(), x0 - radius);
    const auto hi = std::upper_bound(lo, keys_.end(), x0 + radius);
    return { static_cast<std::size_t>(lo - keys_.begin()),
             static_cast<std::size_t>(hi - keys_.begin()) };
  }

  std::span<const double> point(std::size_t position) const
  {
    return { points_.data() + position * d_, d_ };
  }
  std::size_t original_index(std::size_t position) const { return order_[position]; }

private:
  std::size_t d_ = 1;
  std::vector<std::size_t> order_;
  std::vector<double> points_;
  std::vector<double> keys_;
};

} // namespace censadd::detail
