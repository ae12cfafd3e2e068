#pragma once

namespace sectorcorr {

//! One sector of the two-sector event-risk model.
struct SectorParams {
  double p = 0.0;    //!< unconditional event probability, strictly in (0,1)
  double rho = 0.0;  //!< intra-sector latent (asset value) correlation, (0,1)
};

//! The full two-sector model: per-sector parameters plus the correlation of
//! the two systematic factors.
struct PairModel {
  SectorParams sector_a;
  SectorParams sector_b;
  double gamma = 0.0;  //!< inter-sector factor correlation, in [-1,1]
};

//! Throws std::domain_error when parameters leave their admissible ranges.
void validate(const SectorParams& sector);
void validate(const PairModel& model);

//! Conditional event probability given the sector's systematic factor value:
//! Phi((Phi^-1(p) - sqrt(rho)*y) / sqrt(1-rho)). Strictly decreasing in y.
double mixing_prob(const SectorParams& sector, double y);

//! Model-implied moments for one sector: mean and variance of the probit of
//! the conditional event probability, and the probability that two distinct
//! members of the sector both have events on the same date.
struct SectorMoments {
  double mu = 0.0;
  double sigma2 = 0.0;
  double p2 = 0.0;
};

//! Both sectors' moments plus the cross-sector product moment
//! q = E[P * P_tilde] = Phi2(Phi^-1(p), Phi^-1(p_tilde), gamma*sqrt(rho*rho_tilde)).
struct PairMoments {
  SectorMoments sector_a;
  SectorMoments sector_b;
  double q = 0.0;
};

PairMoments pair_moments(const PairModel& model);

}  // namespace sectorcorr
