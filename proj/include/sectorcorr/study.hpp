#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sectorcorr/estimators.hpp"
#include "sectorcorr/stats.hpp"

namespace sectorcorr {

//! One cell of the simulation study: both sectors share (p, rho) and the
//! constant cohort size n across all T dates.
struct ScenarioSpec {
  std::int64_t T = 0;
  std::int64_t n = 0;
  double p = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
  std::int64_t reps = 0;
  std::int64_t m = 0;            //!< bias-correction simulations per step
  std::uint64_t seed = 0;        //!< master seed shared by the whole grid
  std::int64_t scenario_id = 0;  //!< grid position; keys the rng streams
};

void validate(const ScenarioSpec& spec);

struct EstimatorStats {
  Method method = Method::IMM;
  SummaryStats stats;
};

struct ScenarioStats {
  ScenarioSpec spec;
  std::vector<EstimatorStats> per_estimator;  //!< canonical method order
};

//! Study grid configuration, read from a JSON file: level lists for the five
//! swept parameters, scalars for everything else.
struct GridConfig {
  std::vector<std::int64_t> T;
  std::vector<std::int64_t> n;
  std::vector<double> p;
  std::vector<double> rho;
  std::vector<double> gamma;
  std::int64_t reps = 1000;
  std::int64_t m = 25;
  std::uint64_t seed = 1;
  std::vector<Method> estimators;
};

GridConfig parse_grid_config(const std::string& json_text);
GridConfig load_grid_config(const std::string& path);
std::string grid_config_to_json(const GridConfig& config);

//! Cartesian product in the fixed order T, n, p, rho, gamma (gamma varying
//! fastest); scenario_id is the enumeration index.
std::vector<ScenarioSpec> make_grid(const GridConfig& config);

//! Runs all replications of one scenario. Every random draw is determined by
//! (seed, scenario_id, replication, role), so identical specs give
//! bit-identical results on any thread.
ScenarioStats run_scenario(const ScenarioSpec& spec,
                           std::span<const Method> estimators);

struct GridRunOptions {
  int parallelism = 1;
  //! When set, each scenario's rows are stored as
  //! <result_dir>/scenario_NNNNNN.csv; existing files that match the requested
  //! scenario are loaded instead of recomputed (resume). Store I/O failures
  //! are reported on stderr without aborting the grid.
  std::string result_dir;
};

std::vector<ScenarioStats> run_grid(std::span<const ScenarioSpec> grid,
                                    std::span<const Method> estimators,
                                    const GridRunOptions& options = {});

//! Result CSV: one row per (scenario, estimator), shortest round-trip float
//! formatting so re-serialization is byte-stable.
//! Columns: T,n,p,rho,gamma,estimator,bias,std,rmse,min,q05,q25,q50,q75,q95,max,degenerate_count
void write_result_csv(std::ostream& out, std::span<const ScenarioStats> results);
void write_result_csv(const std::string& path,
                      std::span<const ScenarioStats> results);
std::vector<ScenarioStats> read_result_csv(std::istream& in);
std::vector<ScenarioStats> read_result_csv(const std::string& path);

enum class StratVariable { T, n, p, rho, gamma };

std::optional<StratVariable> strat_variable_from_name(std::string_view name);
std::string_view strat_variable_name(StratVariable variable);

//! Statistics averaged over scenarios (degenerate counts average to a mean
//! per scenario, hence the wider type).
struct AveragedStats {
  double bias = 0.0;
  double std_dev = 0.0;
  double rmse = 0.0;
  double min = 0.0;
  double q05 = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q95 = 0.0;
  double max = 0.0;
  double degenerate_mean = 0.0;
};

//! Named access for table rendering; field names are bias, std, rmse, min,
//! q05, q25, q50, q75, q95, max, degenerate.
std::optional<double> stat_field(const AveragedStats& stats,
                                 std::string_view name);

struct StratifiedRow {
  double level = 0.0;
  std::vector<AveragedStats> per_estimator;
};

struct StratifiedTable {
  StratVariable variable = StratVariable::T;
  std::vector<Method> estimators;
  std::vector<StratifiedRow> rows;   //!< ascending by level
  StratifiedRow overall;             //!< unweighted mean over all scenarios
};

//! Per-level unweighted means over a full factorial result set, optionally
//! restricted to one gamma level first. Throws std::runtime_error when the
//! (filtered) results do not form a full factorial grid.
StratifiedTable stratify(std::span<const ScenarioStats> results,
                         StratVariable variable,
                         std::optional<double> gamma_filter = std::nullopt);

//! Table renderings: one column block per statistic field, estimators across.
//! CSV keeps full precision; markdown is aligned with 6 decimal places.
void render_stratified_csv(std::ostream& out, const StratifiedTable& table,
                           std::span<const std::string> fields);
void render_stratified_markdown(std::ostream& out, const StratifiedTable& table,
                                std::span<const std::string> fields);

}  // namespace sectorcorr
