#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sectorcorr {

//! Replication summary for one estimator in one scenario.
struct SummaryStats {
  double bias = 0.0;  //!< mean estimate minus the true value
  double std_dev = 0.0;  //!< sample standard deviation (n-1 denominator)
  double rmse = 0.0;  //!< sqrt of the mean squared error against the truth
  double min = 0.0;
  double q05 = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q95 = 0.0;
  double max = 0.0;
  std::int64_t degenerate_count = 0;
};

//! Quantile by linear interpolation between order statistics at position
//! (n-1)*prob. `sorted` must be ascending and nonempty.
double quantile_sorted(std::span<const double> sorted, double prob);

//! Summarizes replication estimates against the true value. The estimates
//! vector is not assumed sorted; degenerate_count is carried through.
SummaryStats summarize(std::vector<double> estimates, double true_value,
                       std::int64_t degenerate_count);

}  // namespace sectorcorr
