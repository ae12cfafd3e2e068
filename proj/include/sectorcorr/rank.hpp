#pragma once

#include <optional>
#include <span>
#include <vector>

namespace sectorcorr {

//! Kendall's tau-b: sign-product numerator with tie-adjusted denominator,
//! computed in O(T log T) by Knight's merge-sort algorithm. Returns nullopt
//! when every pair is tied in either series (denominator zero).
//! Throws std::domain_error on length mismatch or T < 2.
std::optional<double> kendall_tau_b(std::span<const double> x,
                                    std::span<const double> y);

//! Midranks (average rank over each tie group), 1-based. Equivalent to
//! (T+1)/2 + (1/2) * sum_{s != t} sign(v_t - v_s).
std::vector<double> midranks(std::span<const double> v);

//! Pearson sample correlation; nullopt when either series has zero variance.
std::optional<double> pearson_correlation(std::span<const double> x,
                                          std::span<const double> y);

}  // namespace sectorcorr
