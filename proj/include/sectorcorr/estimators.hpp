#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sectorcorr/panel.hpp"
#include "sectorcorr/rank.hpp"
#include "sectorcorr/rng.hpp"

namespace sectorcorr {

enum class Method { IMM, IM2, IM3, MAD, DMM, MAX, KEN, SPE };

std::string_view method_name(Method method);
std::optional<Method> method_from_name(std::string_view name);

//! An estimate of the inter-sector correlation. Degenerate inputs (constant
//! series, zero MAD, empty event history) yield value 0 with the degenerate
//! flag set; the clamped flag is set exactly when the unclamped arithmetic
//! left [-1,1].
struct GammaEstimate {
  double value = 0.0;
  Method method = Method::IMM;
  bool clamped = false;
  bool degenerate = false;
};

//! Per-date transforms shared by the estimators: the probit of the anchored
//! event rate, g = Phi^-1((d+0.6)/(n+1.2)), and the raw event rate d/n.
struct CrossSectionEstimates {
  std::vector<double> g;
  std::vector<double> g_tilde;
  std::vector<double> p_hat;
  std::vector<double> p_hat_tilde;
};

CrossSectionEstimates cross_section(const Panel& panel);

//! Pearson correlation of the two probit series.
GammaEstimate imm(const CrossSectionEstimates& cs);

//! Sector parameters implied by the sample mean and variance of a probit
//! series through the one-factor moment identities.
struct ImpliedSectorParams {
  double p_hat = 0.0;
  double rho_hat = 0.0;
};

ImpliedSectorParams intra_normal_variance(std::span<const double> g);

//! Simulation-based bias correction of the probit correlation: step k
//! re-simulates m panels at the step k-1 estimate (implied sector parameters
//! held fixed) and shifts by the measured bias, clamping to [-1,1].
//! steps = 2 gives IM2, steps = 3 gives IM3. The rng argument is a stream
//! handle; per-simulation sub-streams are derived from its key, so results
//! do not depend on evaluation order.
GammaEstimate imm_bias_corrected(const Panel& panel, int steps, int m,
                                 const RngStream& rng);

//! The full correction path: element 0 is the plain probit correlation,
//! element k the k-step corrected value. Lets a caller obtain IM2 and IM3
//! from one pass over the simulations.
std::vector<GammaEstimate> imm_bias_correction_path(const Panel& panel,
                                                    int max_steps, int m,
                                                    const RngStream& rng);

//! Scale estimates underlying the robust estimator: median absolute
//! deviations of the sum and difference of the standardized probit series.
struct MadDiagnostics {
  double mad_u = 0.0;
  double mad_v = 0.0;
};

std::pair<GammaEstimate, MadDiagnostics> mad_estimator(
    const CrossSectionEstimates& cs);

//! Intermediate moments of the direct matching estimator. rho_m is set to 0
//! whenever the within-sector second moment falls below p_m^2.
struct DmmDecomposition {
  double p_m = 0.0;
  double p_m_tilde = 0.0;
  double q_m = 0.0;
  double p2_m = 0.0;
  double p2_m_tilde = 0.0;
  double rho_m = 0.0;
  double rho_m_tilde = 0.0;
  double delta_m = 0.0;
  double gamma = 0.0;
};

//! Direct moment matching: inverts the bivariate normal relation between the
//! cross moment q and the latent cross-correlation delta, then normalizes by
//! the implied intra-sector correlations.
std::pair<GammaEstimate, DmmDecomposition> dmm(const Panel& panel);

//! Picks whichever of the two inputs has the larger absolute value; ties go
//! to the direct estimate.
GammaEstimate max_estimator(const GammaEstimate& imm_est,
                            const GammaEstimate& dmm_est);

//! sin(pi/2 * tau_b) over the raw event-rate series.
GammaEstimate ken_gamma(const Panel& panel);

//! 2*sin(pi/6 * rho_S) with rho_S the Pearson correlation of midranks of the
//! raw event-rate series.
GammaEstimate spearman_gamma(const Panel& panel);

}  // namespace sectorcorr
