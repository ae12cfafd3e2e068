#include "sectorcorr/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sectorcorr/bvn.hpp"
#include "sectorcorr/normal.hpp"
#include "sectorcorr/simulate.hpp"

namespace sectorcorr {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

double clamp_corr(double v, bool* clamped) {
  if (v < -1.0 || v > 1.0) {
    if (clamped) *clamped = true;
    return v < -1.0 ? -1.0 : 1.0;
  }
  return v;
}

double median_inplace(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  // Even sample size: average of the two middle order statistics.
  return n % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

// Median absolute deviation around the median (no consistency factor; the
// estimator below uses only MAD ratios, so constant factors cancel).
double mad_scale(std::span<const double> v) {
  std::vector<double> work(v.begin(), v.end());
  const double med = median_inplace(work);
  for (double& w : work) w = std::fabs(w - med);
  return median_inplace(work);
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::IMM: return "IMM";
    case Method::IM2: return "IM2";
    case Method::IM3: return "IM3";
    case Method::MAD: return "MAD";
    case Method::DMM: return "DMM";
    case Method::MAX: return "MAX";
    case Method::KEN: return "KEN";
    case Method::SPE: return "SPE";
  }
  return "?";
}

std::optional<Method> method_from_name(std::string_view name) {
  if (name == "IMM") return Method::IMM;
  if (name == "IM2") return Method::IM2;
  if (name == "IM3") return Method::IM3;
  if (name == "MAD") return Method::MAD;
  if (name == "DMM") return Method::DMM;
  if (name == "MAX") return Method::MAX;
  if (name == "KEN") return Method::KEN;
  if (name == "SPE") return Method::SPE;
  return std::nullopt;
}

CrossSectionEstimates cross_section(const Panel& panel) {
  validate(panel);
  CrossSectionEstimates cs;
  const std::size_t T = panel.size();
  cs.g.reserve(T);
  cs.g_tilde.reserve(T);
  cs.p_hat.reserve(T);
  cs.p_hat_tilde.reserve(T);
  for (const PanelRow& row : panel) {
    const double na = static_cast<double>(row.n);
    const double nb = static_cast<double>(row.n_tilde);
    const double da = static_cast<double>(row.d);
    const double db = static_cast<double>(row.d_tilde);
    cs.g.push_back(std_normal_inv_cdf((da + 0.6) / (na + 1.2)));
    cs.g_tilde.push_back(std_normal_inv_cdf((db + 0.6) / (nb + 1.2)));
    cs.p_hat.push_back(da / na);
    cs.p_hat_tilde.push_back(db / nb);
  }
  return cs;
}

GammaEstimate imm(const CrossSectionEstimates& cs) {
  GammaEstimate est;
  est.method = Method::IMM;
  const auto r = pearson_correlation(cs.g, cs.g_tilde);
  if (!r) {
    est.degenerate = true;
    return est;
  }
  est.value = *r;
  return est;
}

ImpliedSectorParams intra_normal_variance(std::span<const double> g) {
  if (g.size() < 2) {
    throw std::domain_error("intra_normal_variance: need at least two dates");
  }
  const double n = static_cast<double>(g.size());
  double mean = 0.0;
  for (double v : g) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : g) {
    const double d = v - mean;
    ss += d * d;
  }
  const double var = ss / (n - 1.0);
  ImpliedSectorParams out;
  out.rho_hat = var / (1.0 + var);
  out.p_hat = std_normal_cdf(mean * std::sqrt(1.0 - out.rho_hat));
  return out;
}

std::vector<GammaEstimate> imm_bias_correction_path(const Panel& panel,
                                                    int max_steps, int m,
                                                    const RngStream& rng) {
  if (max_steps < 1 || m < 1) {
    throw std::domain_error(
        "imm_bias_correction_path: need max_steps >= 1 and m >= 1");
  }
  const CrossSectionEstimates cs = cross_section(panel);
  GammaEstimate base = imm(cs);
  std::vector<GammaEstimate> path;
  path.push_back(base);
  if (base.degenerate) {
    // Nothing to correct against; propagate the flag through all steps.
    for (int step = 1; step < max_steps; ++step) {
      GammaEstimate est = base;
      est.method = step == 1 ? Method::IM2 : Method::IM3;
      path.push_back(est);
    }
    return path;
  }

  // Sector parameters implied once from the observed panel; held fixed
  // across correction steps.
  const ImpliedSectorParams ia = intra_normal_variance(cs.g);
  const ImpliedSectorParams ib = intra_normal_variance(cs.g_tilde);
  PairModel model;
  model.sector_a = {ia.p_hat, ia.rho_hat};
  model.sector_b = {ib.p_hat, ib.rho_hat};

  std::vector<CohortSizes> sizes;
  sizes.reserve(panel.size());
  for (const PanelRow& row : panel) sizes.push_back({row.n, row.n_tilde});

  double current = base.value;
  for (int step = 1; step < max_steps; ++step) {
    model.gamma = current;
    const RngStream step_stream = rng.split(static_cast<std::uint64_t>(step));
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      RngStream sim_stream = step_stream.split(static_cast<std::uint64_t>(i));
      const Panel sim = simulate_panel(model, sizes, sim_stream);
      sum += imm(cross_section(sim)).value;  // degenerate draws count as 0
    }
    bool clamped = false;
    current = clamp_corr(current + (base.value - sum / m), &clamped);
    GammaEstimate est;
    est.value = current;
    est.method = step == 1 ? Method::IM2 : Method::IM3;
    est.clamped = clamped;
    path.push_back(est);
  }
  return path;
}

GammaEstimate imm_bias_corrected(const Panel& panel, int steps, int m,
                                 const RngStream& rng) {
  if (steps != 2 && steps != 3) {
    throw std::domain_error("imm_bias_corrected: steps must be 2 or 3");
  }
  return imm_bias_correction_path(panel, steps, m, rng).back();
}

std::pair<GammaEstimate, MadDiagnostics> mad_estimator(
    const CrossSectionEstimates& cs) {
  GammaEstimate est;
  est.method = Method::MAD;
  MadDiagnostics diag;
  if (cs.g.size() < 2 || cs.g.size() != cs.g_tilde.size()) {
    throw std::domain_error("mad_estimator: need two series of length >= 2");
  }

  std::vector<double> work(cs.g.begin(), cs.g.end());
  const double med_a = median_inplace(work);
  const double mad_a = mad_scale(cs.g);
  work.assign(cs.g_tilde.begin(), cs.g_tilde.end());
  const double med_b = median_inplace(work);
  const double mad_b = mad_scale(cs.g_tilde);
  if (mad_a == 0.0 || mad_b == 0.0) {
    est.degenerate = true;
    return {est, diag};
  }

  const std::size_t T = cs.g.size();
  std::vector<double> u(T), v(T);
  for (std::size_t i = 0; i < T; ++i) {
    const double ga = (cs.g[i] - med_a) / mad_a;
    const double gb = (cs.g_tilde[i] - med_b) / mad_b;
    u[i] = ga + gb;
    v[i] = ga - gb;
  }
  diag.mad_u = mad_scale(u);
  diag.mad_v = mad_scale(v);
  const double mu2 = diag.mad_u * diag.mad_u;
  const double mv2 = diag.mad_v * diag.mad_v;
  if (mu2 + mv2 == 0.0) {
    est.degenerate = true;
    return {est, diag};
  }
  est.value = (mu2 - mv2) / (mu2 + mv2);
  return {est, diag};
}

std::pair<GammaEstimate, DmmDecomposition> dmm(const Panel& panel) {
  validate(panel);
  GammaEstimate est;
  est.method = Method::DMM;
  DmmDecomposition dec;

  const double T = static_cast<double>(panel.size());
  for (const PanelRow& row : panel) {
    if (row.n < 2 || row.n_tilde < 2) {
      throw std::domain_error("dmm: need cohort sizes >= 2 for pair moments");
    }
    const double na = static_cast<double>(row.n);
    const double nb = static_cast<double>(row.n_tilde);
    const double ra = static_cast<double>(row.d) / na;
    const double rb = static_cast<double>(row.d_tilde) / nb;
    dec.p_m += ra;
    dec.p_m_tilde += rb;
    dec.q_m += ra * rb;
    dec.p2_m += static_cast<double>(row.d) * static_cast<double>(row.d - 1) /
                (na * (na - 1.0));
    dec.p2_m_tilde += static_cast<double>(row.d_tilde) *
                      static_cast<double>(row.d_tilde - 1) /
                      (nb * (nb - 1.0));
  }
  dec.p_m /= T;
  dec.p_m_tilde /= T;
  dec.q_m /= T;
  dec.p2_m /= T;
  dec.p2_m_tilde /= T;

  if (dec.p_m <= 0.0 || dec.p_m >= 1.0 || dec.p_m_tilde <= 0.0 ||
      dec.p_m_tilde >= 1.0) {
    est.degenerate = true;
    return {est, dec};
  }

  const double a = std_normal_inv_cdf(dec.p_m);
  const double b = std_normal_inv_cdf(dec.p_m_tilde);

  // The moments satisfy the Frechet bounds exactly in real arithmetic
  // (term-by-term: max(0, x+y-1) <= x*y <= min(x,y) for x,y in [0,1]);
  // summation rounding can leave q_m a few ulps outside, so nudge it back
  // before inverting.
  const double q_lo = std::max(0.0, dec.p_m + dec.p_m_tilde - 1.0);
  const double q_hi = std::min(dec.p_m, dec.p_m_tilde);
  dec.q_m = std::min(q_hi, std::max(q_lo, dec.q_m));
  dec.delta_m = solve_bvn_correlation(a, b, dec.q_m);

  const auto implied_rho = [](double thr, double p_m, double p2_m) {
    if (p2_m < p_m * p_m) return 0.0;
    return solve_bvn_correlation(thr, thr, std::min(p2_m, p_m));
  };
  dec.rho_m = implied_rho(a, dec.p_m, dec.p2_m);
  dec.rho_m_tilde = implied_rho(b, dec.p_m_tilde, dec.p2_m_tilde);

  const double rho_prod = dec.rho_m * dec.rho_m_tilde;
  if (rho_prod == 0.0) {
    if (std::fabs(dec.delta_m) <= 1e-12) {
      est.value = 0.0;
    } else {
      est.value = dec.delta_m > 0.0 ? 1.0 : -1.0;
    }
    est.degenerate = true;
    dec.gamma = est.value;
    return {est, dec};
  }
  est.value = clamp_corr(dec.delta_m / std::sqrt(rho_prod), &est.clamped);
  dec.gamma = est.value;
  return {est, dec};
}

GammaEstimate max_estimator(const GammaEstimate& imm_est,
                            const GammaEstimate& dmm_est) {
  GammaEstimate est =
      std::fabs(imm_est.value) > std::fabs(dmm_est.value) ? imm_est : dmm_est;
  est.method = Method::MAX;
  return est;
}

GammaEstimate ken_gamma(const Panel& panel) {
  const CrossSectionEstimates cs = cross_section(panel);
  GammaEstimate est;
  est.method = Method::KEN;
  const auto tau = kendall_tau_b(cs.p_hat, cs.p_hat_tilde);
  if (!tau) {
    est.degenerate = true;
    return est;
  }
  est.value = std::sin(kPi / 2.0 * *tau);
  return est;
}

GammaEstimate spearman_gamma(const Panel& panel) {
  const CrossSectionEstimates cs = cross_section(panel);
  GammaEstimate est;
  est.method = Method::SPE;
  const std::vector<double> ranks_a = midranks(cs.p_hat);
  const std::vector<double> ranks_b = midranks(cs.p_hat_tilde);
  const auto rho_s = pearson_correlation(ranks_a, ranks_b);
  if (!rho_s) {
    est.degenerate = true;
    return est;
  }
  est.value = 2.0 * std::sin(kPi / 6.0 * *rho_s);
  return est;
}

}  // namespace sectorcorr
