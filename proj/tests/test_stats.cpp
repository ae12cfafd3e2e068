#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sectorcorr/rng.hpp"
#include "sectorcorr/stats.hpp"

using namespace sectorcorr;

TEST_SUITE("stats") {

TEST_CASE("quantiles interpolate between order statistics") {
  const std::vector<double> v = {1, 2, 3, 4};
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 0.25) == 1.75);
  CHECK(quantile_sorted(v, 0.5) == 2.5);
  CHECK(quantile_sorted(v, 0.75) == 3.25);
  CHECK(quantile_sorted(v, 1.0) == 4.0);

  const std::vector<double> w = {10, 20, 30, 40, 50};
  CHECK(quantile_sorted(w, 0.05) == 12.0);  // position 0.2
  CHECK(quantile_sorted(w, 0.5) == 30.0);
  CHECK(quantile_sorted(w, 0.95) == 48.0);

  const std::vector<double> one = {7};
  CHECK(quantile_sorted(one, 0.3) == 7.0);

  CHECK_THROWS_AS(quantile_sorted(std::vector<double>{}, 0.5),
                  std::domain_error);
}

TEST_CASE("summary on a hand example") {
  const SummaryStats s = summarize({0.1, 0.2, 0.3}, 0.25, 2);
  CHECK(std::fabs(s.bias - (-0.05)) < 1e-15);
  CHECK(std::fabs(s.std_dev - 0.1) < 1e-15);
  const double mse = (0.15 * 0.15 + 0.05 * 0.05 + 0.05 * 0.05) / 3.0;
  CHECK(std::fabs(s.rmse - std::sqrt(mse)) < 1e-15);
  CHECK(s.min == 0.1);
  CHECK(s.q50 == 0.2);
  CHECK(s.max == 0.3);
  CHECK(s.degenerate_count == 2);
}

TEST_CASE("rmse decomposes into bias and variance") {
  RngStream rng(41);
  std::vector<double> values(321);
  for (double& v : values) v = rng.next_normal() * 0.3 + 0.1;
  const SummaryStats s = summarize(values, 0.25, 0);
  const double n = static_cast<double>(values.size());
  const double recombined =
      s.bias * s.bias + s.std_dev * s.std_dev * (n - 1.0) / n;
  CHECK(std::fabs(s.rmse * s.rmse - recombined) < 1e-12);
}

TEST_CASE("summary quantiles are ordered") {
  RngStream rng(42);
  std::vector<double> values(500);
  for (double& v : values) v = rng.next_uniform() * 2.0 - 1.0;
  const SummaryStats s = summarize(values, 0.0, 0);
  CHECK(s.min <= s.q05);
  CHECK(s.q05 <= s.q25);
  CHECK(s.q25 <= s.q50);
  CHECK(s.q50 <= s.q75);
  CHECK(s.q75 <= s.q95);
  CHECK(s.q95 <= s.max);
}

TEST_CASE("single estimate gets zero spread") {
  const SummaryStats s = summarize({0.4}, 0.25, 0);
  CHECK(s.std_dev == 0.0);
  CHECK(std::fabs(s.rmse - 0.15) < 1e-15);
  CHECK(s.min == 0.4);
  CHECK(s.max == 0.4);
}

TEST_CASE("empty sample is rejected") {
  CHECK_THROWS_AS(summarize({}, 0.0, 0), std::domain_error);
}

}  // TEST_SUITE
