#pragma once

#include <cstdint>

namespace sectorcorr {

//! P(X2 <= X1) for independent beta posteriors X1 ~ Beta(d1+1, n1-d1+1) and
//! X2 ~ Beta(d2+1, n2-d2+1), i.e. the posterior probability (under uniform
//! priors) that the first sample's event rate is the larger one:
//!
//!   C(n1+n2+2, n1+1)^-1 * sum_{i=0}^{d1} C(d2+i, d2) * C(n1+n2+1-d2-i, n2-d2)
//!
//! evaluated in the log domain. Throws std::domain_error unless
//! 0 <= d <= n for both pairs.
double bayes_sign_prob(std::int64_t d1, std::int64_t n1, std::int64_t d2,
                       std::int64_t n2);

//! P(X1 > X2) - P(X1 < X2) = 1 - 2*P(X1 <= X2) in [-1, 1]; the posterior
//! expected sign of the rate difference.
double bayes_sign(std::int64_t d1, std::int64_t n1, std::int64_t d2,
                  std::int64_t n2);

}  // namespace sectorcorr
