#include "sectorcorr/rank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace sectorcorr {

namespace {

// Counts inversions (strictly decreasing pairs) in v by iterative merge sort.
// Equal elements are taken from the left run first, so ties contribute
// nothing.
std::int64_t count_inversions(std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> buf(n);
  std::int64_t inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
      const std::size_t mid = lo + width;
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, out = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          inversions += static_cast<std::int64_t>(mid - i);
          buf[out++] = v[j++];
        } else {
          buf[out++] = v[i++];
        }
      }
      while (i < mid) buf[out++] = v[i++];
      while (j < hi) buf[out++] = v[j++];
      std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                buf.begin() + static_cast<std::ptrdiff_t>(hi),
                v.begin() + static_cast<std::ptrdiff_t>(lo));
    }
  }
  return inversions;
}

// Sum of t*(t-1)/2 over runs of equal values in a sorted range.
template <typename Iter, typename Equal>
std::int64_t tied_pairs(Iter first, Iter last, Equal equal) {
  std::int64_t total = 0;
  Iter run = first;
  for (Iter it = first; it != last; ++it) {
    if (it != run && !equal(*run, *it)) run = it;
    total += std::distance(run, it);  // pairs formed with earlier run members
  }
  return total;
}

}  // namespace

std::optional<double> kendall_tau_b(std::span<const double> x,
                                    std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::domain_error("kendall_tau_b: series lengths differ");
  }
  const std::size_t n = x.size();
  if (n < 2) {
    throw std::domain_error("kendall_tau_b: need at least two observations");
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  const std::int64_t n64 = static_cast<std::int64_t>(n);
  const std::int64_t total_pairs = n64 * (n64 - 1) / 2;

  // Pairs tied in x, and tied in both, from the (x,y)-sorted order.
  std::int64_t ties_x = 0;
  std::int64_t ties_xy = 0;
  {
    std::size_t run = 0, run_xy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && x[idx[i]] != x[idx[run]]) run = i;
      if (i > 0 &&
          (x[idx[i]] != x[idx[run_xy]] || y[idx[i]] != y[idx[run_xy]])) {
        run_xy = i;
      }
      ties_x += static_cast<std::int64_t>(i - run);
      ties_xy += static_cast<std::int64_t>(i - run_xy);
    }
  }

  // Discordant pairs: inversions of y in x-order. The secondary y sort key
  // keeps pairs inside an x-tie group out of the count.
  std::vector<double> y_in_x_order(n);
  for (std::size_t i = 0; i < n; ++i) y_in_x_order[i] = y[idx[i]];
  const std::int64_t discordant = count_inversions(y_in_x_order);

  std::vector<double> y_sorted(y.begin(), y.end());
  std::sort(y_sorted.begin(), y_sorted.end());
  const std::int64_t ties_y = tied_pairs(
      y_sorted.begin(), y_sorted.end(),
      [](double a, double b) { return a == b; });

  const std::int64_t den_x = total_pairs - ties_x;
  const std::int64_t den_y = total_pairs - ties_y;
  if (den_x == 0 || den_y == 0) return std::nullopt;

  const std::int64_t numerator =
      total_pairs - ties_x - ties_y + ties_xy - 2 * discordant;
  return static_cast<double>(numerator) /
         std::sqrt(static_cast<double>(den_x) * static_cast<double>(den_y));
}

std::vector<double> midranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    // Average of the 1-based positions i+1 .. j+1.
    const double rank = static_cast<double>(i + j) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> pearson_correlation(std::span<const double> x,
                                          std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::domain_error("pearson_correlation: need equal lengths >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  const double r = sxy / std::sqrt(sxx * syy);
  return std::min(1.0, std::max(-1.0, r));
}

}  // namespace sectorcorr
