#pragma once

namespace sectorcorr {

//! Bivariate standard normal distribution function
//! Phi2(h, k, r) = P(X <= h, Y <= k) for correlation r.
//!
//! h and k may be +/-infinity (mapped to the marginal/0/1 limits);
//! r must lie in [-1, 1]. Absolute error is below ~5e-16 over the whole
//! domain. Throws std::domain_error on NaN arguments or |r| > 1.
double bvn_cdf(double h, double k, double r);

//! Solves Phi2(a, b, r) = target for r in [-1, 1].
//!
//! The left side is continuous and nondecreasing in r between the Frechet
//! bounds max(0, Phi(a)+Phi(b)-1) and min(Phi(a), Phi(b)), so the solution
//! is unique. Targets at (or within 1e-13 of) a bound return exactly -1 or
//! +1; targets beyond that tolerance throw std::domain_error.
double solve_bvn_correlation(double a, double b, double target);

}  // namespace sectorcorr
