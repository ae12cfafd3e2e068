#include "sectorcorr/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "sectorcorr/normal.hpp"

namespace sectorcorr {

LatentPair simulate_latent(const PairModel& model, RngStream& rng) {
  LatentPair lp;
  lp.y = rng.next_normal();
  const double z = rng.next_normal();
  // 1 - gamma^2 is exactly 0 at gamma = +/-1, so y_tilde = +/-y exactly.
  lp.y_tilde =
      model.gamma * lp.y + std::sqrt(1.0 - model.gamma * model.gamma) * z;
  return lp;
}

Panel simulate_panel(const PairModel& model,
                     const std::vector<CohortSizes>& sizes, RngStream& rng) {
  validate(model);
  if (sizes.size() < 2) {
    throw std::domain_error("simulate_panel: need at least two dates");
  }
  // Per-sector constants of the mixing function, hoisted out of the date loop.
  const double thr_a = std_normal_inv_cdf(model.sector_a.p);
  const double thr_b = std_normal_inv_cdf(model.sector_b.p);
  const double load_a = std::sqrt(model.sector_a.rho);
  const double load_b = std::sqrt(model.sector_b.rho);
  const double resid_a = std::sqrt(1.0 - model.sector_a.rho);
  const double resid_b = std::sqrt(1.0 - model.sector_b.rho);

  Panel panel;
  panel.reserve(sizes.size());
  std::int64_t t = 0;
  for (const CohortSizes& sz : sizes) {
    if (sz.n < 1 || sz.n_tilde < 1) {
      throw std::domain_error("simulate_panel: cohort sizes must be >= 1");
    }
    const LatentPair lp = simulate_latent(model, rng);
    const double prob_a = std_normal_cdf((thr_a - load_a * lp.y) / resid_a);
    const double prob_b =
        std_normal_cdf((thr_b - load_b * lp.y_tilde) / resid_b);
    PanelRow row;
    row.t = ++t;
    row.n = sz.n;
    row.n_tilde = sz.n_tilde;
    row.d = rng.next_binomial(sz.n, prob_a);
    row.d_tilde = rng.next_binomial(sz.n_tilde, prob_b);
    panel.push_back(row);
  }
  return panel;
}

Panel simulate_panel(const PairModel& model, std::int64_t T, std::int64_t n,
                     std::int64_t n_tilde, RngStream& rng) {
  if (T < 2) {
    throw std::domain_error("simulate_panel: need at least two dates");
  }
  const std::vector<CohortSizes> sizes(static_cast<std::size_t>(T),
                                       CohortSizes{n, n_tilde});
  return simulate_panel(model, sizes, rng);
}

}  // namespace sectorcorr
