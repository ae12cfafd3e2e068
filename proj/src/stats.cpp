#include "sectorcorr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sectorcorr {

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) {
    throw std::domain_error("quantile_sorted: empty sample");
  }
  if (prob <= 0.0) return sorted.front();
  if (prob >= 1.0) return sorted.back();
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

SummaryStats summarize(std::vector<double> estimates, double true_value,
                       std::int64_t degenerate_count) {
  if (estimates.empty()) {
    throw std::domain_error("summarize: no estimates");
  }
  SummaryStats s;
  s.degenerate_count = degenerate_count;
  const double n = static_cast<double>(estimates.size());

  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= n;
  s.bias = mean - true_value;

  double ss = 0.0;
  double mse = 0.0;
  for (double e : estimates) {
    const double dev = e - mean;
    ss += dev * dev;
    const double err = e - true_value;
    mse += err * err;
  }
  s.std_dev = estimates.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.rmse = std::sqrt(mse / n);

  std::sort(estimates.begin(), estimates.end());
  s.min = estimates.front();
  s.q05 = quantile_sorted(estimates, 0.05);
  s.q25 = quantile_sorted(estimates, 0.25);
  s.q50 = quantile_sorted(estimates, 0.50);
  s.q75 = quantile_sorted(estimates, 0.75);
  s.q95 = quantile_sorted(estimates, 0.95);
  s.max = estimates.back();
  return s;
}

}  // namespace sectorcorr
