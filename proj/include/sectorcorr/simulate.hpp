#pragma once

#include <cstdint>
#include <vector>

#include "sectorcorr/model.hpp"
#include "sectorcorr/panel.hpp"
#include "sectorcorr/rng.hpp"

namespace sectorcorr {

//! One date's correlated systematic factor pair: y standard normal,
//! y_tilde = gamma*y + sqrt(1-gamma^2)*z. Exactly comonotone at gamma = +/-1.
struct LatentPair {
  double y = 0.0;
  double y_tilde = 0.0;
};

LatentPair simulate_latent(const PairModel& model, RngStream& rng);

//! Per-date cohort sizes for the two sectors.
struct CohortSizes {
  std::int64_t n = 0;
  std::int64_t n_tilde = 0;
};

//! Simulates a full panel: per date, draw the latent pair, map through
//! mixing_prob, then draw conditionally independent binomial event counts.
//! Throws std::domain_error for fewer than two dates or non-positive sizes.
Panel simulate_panel(const PairModel& model,
                     const std::vector<CohortSizes>& sizes, RngStream& rng);

//! Constant-size convenience overload used by the study grid.
Panel simulate_panel(const PairModel& model, std::int64_t T, std::int64_t n,
                     std::int64_t n_tilde, RngStream& rng);

}  // namespace sectorcorr
