#pragma once

namespace sectorcorr {

//! Standard normal density phi(x) = exp(-x^2/2)/sqrt(2*pi).
double std_normal_pdf(double x);

//! Standard normal distribution function Phi(x), absolute error ~1 ulp
//! (computed through erfc so both tails keep full relative accuracy).
double std_normal_cdf(double x);

//! Inverse of std_normal_cdf on (0,1).
//! Throws std::domain_error for p <= 0 or p >= 1.
double std_normal_inv_cdf(double p);

}  // namespace sectorcorr
