#pragma once

#include <span>
#include <vector>

namespace pqos {

/// Linearly interpolated quantile of sorted data (q in [0, 1]).
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double q);

struct BoxStats {
  std::size_t samples = 0;
  double min = 0.0;
  double whisker_low = 0.0;   // lowest sample >= p25 - 1.5 IQR
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
  double whisker_high = 0.0;  // highest sample <= p75 + 1.5 IQR
  double max = 0.0;
  double mean = 0.0;
};

/// Tukey box-plot statistics. Empty input yields all zeros.
[[nodiscard]] BoxStats box_stats(std::vector<double> values);

}  // namespace pqos
