#include "pqos/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pqos {

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) {
    throw std::domain_error("quantile of an empty sample");
  }
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

BoxStats box_stats(std::vector<double> values) {
  BoxStats b;
  if (values.empty()) {
    return b;
  }
  std::sort(values.begin(), values.end());
  b.samples = values.size();
  b.min = values.front();
  b.max = values.back();
  b.p25 = quantile_sorted(values, 0.25);
  b.median = quantile_sorted(values, 0.5);
  b.p75 = quantile_sorted(values, 0.75);
  const double iqr = b.p75 - b.p25;
  const double lo_fence = b.p25 - 1.5 * iqr;
  const double hi_fence = b.p75 + 1.5 * iqr;
  b.whisker_low = *std::lower_bound(values.begin(), values.end(), lo_fence);
  b.whisker_high = *std::prev(std::upper_bound(values.begin(), values.end(), hi_fence));
  b.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return b;
}

}  // namespace pqos
