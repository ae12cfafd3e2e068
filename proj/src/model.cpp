#include "sectorcorr/model.hpp"

#include <cmath>
#include <stdexcept>

#include "sectorcorr/bvn.hpp"
#include "sectorcorr/normal.hpp"

namespace sectorcorr {

void validate(const SectorParams& sector) {
  if (!(sector.p > 0.0 && sector.p < 1.0)) {
    throw std::domain_error("SectorParams: p must lie strictly in (0,1)");
  }
  if (!(sector.rho > 0.0 && sector.rho < 1.0)) {
    throw std::domain_error("SectorParams: rho must lie strictly in (0,1)");
  }
}

void validate(const PairModel& model) {
  validate(model.sector_a);
  validate(model.sector_b);
  if (!(model.gamma >= -1.0 && model.gamma <= 1.0)) {
    throw std::domain_error("PairModel: gamma must lie in [-1,1]");
  }
}

double mixing_prob(const SectorParams& sector, double y) {
  const double threshold = std_normal_inv_cdf(sector.p);
  return std_normal_cdf((threshold - std::sqrt(sector.rho) * y) /
                        std::sqrt(1.0 - sector.rho));
}

namespace {

SectorMoments sector_moments(const SectorParams& sector) {
  const double threshold = std_normal_inv_cdf(sector.p);
  SectorMoments m;
  m.mu = threshold / std::sqrt(1.0 - sector.rho);
  m.sigma2 = sector.rho / (1.0 - sector.rho);
  m.p2 = bvn_cdf(threshold, threshold, sector.rho);
  return m;
}

}  // namespace

PairMoments pair_moments(const PairModel& model) {
  validate(model);
  PairMoments pm;
  pm.sector_a = sector_moments(model.sector_a);
  pm.sector_b = sector_moments(model.sector_b);
  pm.q = bvn_cdf(std_normal_inv_cdf(model.sector_a.p),
                 std_normal_inv_cdf(model.sector_b.p),
                 model.gamma *
                     std::sqrt(model.sector_a.rho * model.sector_b.rho));
  return pm;
}

}  // namespace sectorcorr
