#include "sectorcorr/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace sectorcorr {

namespace {

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n + 1)) -
         std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

void check_counts(std::int64_t d, std::int64_t n, const char* which) {
  if (d < 0 || n < 0 || d > n) {
    throw std::domain_error(std::string("bayes_sign: need 0 <= d <= n for ") +
                            which);
  }
}

}  // namespace

double bayes_sign_prob(std::int64_t d1, std::int64_t n1, std::int64_t d2,
                       std::int64_t n2) {
  check_counts(d1, n1, "the first sample");
  check_counts(d2, n2, "the second sample");

  // Terms can span hundreds of orders of magnitude for large n, so sum
  // exp(log term - max log term) and restore the shift at the end.
  std::vector<double> log_terms;
  log_terms.reserve(static_cast<std::size_t>(d1) + 1);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i <= d1; ++i) {
    const double lt = log_choose(d2 + i, d2) +
                      log_choose(n1 + n2 + 1 - d2 - i, n2 - d2);
    log_terms.push_back(lt);
    max_log = std::max(max_log, lt);
  }
  double sum = 0.0;
  for (double lt : log_terms) sum += std::exp(lt - max_log);
  const double log_prob =
      max_log + std::log(sum) - log_choose(n1 + n2 + 2, n1 + 1);
  return std::min(1.0, std::exp(log_prob));
}

double bayes_sign(std::int64_t d1, std::int64_t n1, std::int64_t d2,
                  std::int64_t n2) {
  // P(X1 > X2) - P(X1 < X2) = 1 - 2*P(X1 <= X2); the swapped-argument call
  // gives P(X1 <= X2) directly.
  return 1.0 - 2.0 * bayes_sign_prob(d2, n2, d1, n1);
}

}  // namespace sectorcorr
