// Command-line front end: simulate panels, estimate the inter-sector
// correlation from panel files, run study grids, render stratified tables,
// and evaluate the Bayes sign probability for a pair of count observations.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sectorcorr/bayes.hpp"
#include "sectorcorr/estimators.hpp"
#include "sectorcorr/model.hpp"
#include "sectorcorr/panel.hpp"
#include "sectorcorr/rng.hpp"
#include "sectorcorr/simulate.hpp"
#include "sectorcorr/study.hpp"

namespace {

using namespace sectorcorr;

std::string format_double(double value) {
  std::array<char, 40> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::vector<Method> parse_estimator_list(const std::string& text) {
  std::vector<Method> methods;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::string token = text.substr(start, comma - start);
    start = comma + 1;
    std::string upper;
    for (char c : token) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        upper.push_back(
            static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      }
    }
    if (upper.empty()) continue;
    if (upper == "ALL") {
      return {Method::IMM, Method::IM2, Method::IM3, Method::MAD, Method::DMM,
              Method::MAX, Method::KEN, Method::SPE};
    }
    const std::optional<Method> method = method_from_name(upper);
    if (!method) {
      throw std::runtime_error("unknown estimator '" + token + "'");
    }
    if (std::find(methods.begin(), methods.end(), *method) == methods.end()) {
      methods.push_back(*method);
    }
  }
  if (methods.empty()) throw std::runtime_error("empty estimator list");
  std::sort(methods.begin(), methods.end(), [](Method a, Method b) {
    return static_cast<int>(a) < static_cast<int>(b);
  });
  return methods;
}

struct SimulateArgs {
  std::int64_t T = 0;
  std::int64_t n = 0;
  double p = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
  double p_tilde = -1.0;
  double rho_tilde = -1.0;
  std::int64_t n_tilde = -1;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_simulate(const SimulateArgs& args) {
  PairModel model;
  model.sector_a = {args.p, args.rho};
  model.sector_b = {args.p_tilde >= 0.0 ? args.p_tilde : args.p,
                    args.rho_tilde >= 0.0 ? args.rho_tilde : args.rho};
  model.gamma = args.gamma;
  validate(model);

  RngStream rng(args.seed);
  const Panel panel = simulate_panel(
      model, args.T, args.n, args.n_tilde >= 0 ? args.n_tilde : args.n, rng);
  write_panel_csv(args.out, panel);
  std::cout << "seed: " << args.seed << '\n';
  std::cout << "panel: " << args.out << " (" << panel.size() << " dates)\n";
  return 0;
}

struct EstimateArgs {
  std::string in;
  std::string estimators = "IMM";
  std::int64_t m = 100;
  std::uint64_t seed = 1;
  std::string out;
};

void write_estimate_report(std::ostream& report, const Panel& panel,
                           const std::vector<Method>& methods, std::int64_t m,
                           const RngStream& rng) {
  auto want = [&methods](Method method) {
    return std::find(methods.begin(), methods.end(), method) != methods.end();
  };

  const CrossSectionEstimates cs = cross_section(panel);
  const GammaEstimate imm_est = imm(cs);

  std::vector<GammaEstimate> rows;
  std::optional<DmmDecomposition> dmm_rows;

  std::vector<GammaEstimate> path;
  if (want(Method::IM2) || want(Method::IM3)) {
    const int steps = want(Method::IM3) ? 3 : 2;
    path = imm_bias_correction_path(panel, steps, static_cast<int>(m), rng);
  }
  GammaEstimate dmm_est;
  DmmDecomposition dec;
  if (want(Method::DMM) || want(Method::MAX)) {
    auto [est, decomposition] = dmm(panel);
    dmm_est = est;
    dec = decomposition;
  }

  for (Method method : methods) {
    switch (method) {
      case Method::IMM: rows.push_back(imm_est); break;
      case Method::IM2: rows.push_back(path.at(1)); break;
      case Method::IM3: rows.push_back(path.at(2)); break;
      case Method::MAD: rows.push_back(mad_estimator(cs).first); break;
      case Method::DMM:
        rows.push_back(dmm_est);
        dmm_rows = dec;
        break;
      case Method::MAX: rows.push_back(max_estimator(imm_est, dmm_est)); break;
      case Method::KEN: rows.push_back(ken_gamma(panel)); break;
      case Method::SPE: rows.push_back(spearman_gamma(panel)); break;
    }
  }

  report << "estimator,value,clamped,degenerate,p_m,p_m_tilde,q_m,p2_m,"
            "p2_m_tilde,rho_m,rho_m_tilde,delta_m\n";
  for (const GammaEstimate& est : rows) {
    report << method_name(est.method) << ',' << format_double(est.value) << ','
           << (est.clamped ? 1 : 0) << ',' << (est.degenerate ? 1 : 0);
    if (est.method == Method::DMM && dmm_rows) {
      const DmmDecomposition& d = *dmm_rows;
      report << ',' << format_double(d.p_m) << ',' << format_double(d.p_m_tilde)
             << ',' << format_double(d.q_m) << ',' << format_double(d.p2_m)
             << ',' << format_double(d.p2_m_tilde) << ','
             << format_double(d.rho_m) << ',' << format_double(d.rho_m_tilde)
             << ',' << format_double(d.delta_m);
    } else {
      report << ",,,,,,,,";
    }
    report << '\n';
  }
}

int cmd_estimate(const EstimateArgs& args) {
  const std::vector<Method> methods = parse_estimator_list(args.estimators);
  const Panel panel = read_panel_csv(args.in);
  const RngStream rng(args.seed);

  const bool to_file = !args.out.empty();
  std::ostream& meta = to_file ? std::cout : std::cerr;
  meta << "seed: " << args.seed << '\n';

  if (to_file) {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot open '" + args.out + "' for writing");
    }
    write_estimate_report(out, panel, methods, args.m, rng);
    if (!out) throw std::runtime_error("write failed for '" + args.out + "'");
  } else {
    write_estimate_report(std::cout, panel, methods, args.m, rng);
  }
  return 0;
}

struct StudyArgs {
  std::string config;
  std::string out;
  int parallelism = 1;
  std::string estimators;
  std::int64_t reps = -1;
  std::int64_t m = -1;
  std::int64_t seed = -1;
};

int cmd_study(const StudyArgs& args) {
  GridConfig config = load_grid_config(args.config);
  if (!args.estimators.empty()) {
    config.estimators = parse_estimator_list(args.estimators);
  }
  if (args.reps >= 0) config.reps = args.reps;
  if (args.m >= 0) config.m = args.m;
  if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);

  namespace fs = std::filesystem;
  fs::create_directories(args.out);
  const std::string meta_path = (fs::path(args.out) / "meta.json").string();
  const std::string effective = grid_config_to_json(config);
  if (fs::exists(meta_path)) {
    std::ifstream in(meta_path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (buffer.str() != effective) {
      throw std::runtime_error(
          "output directory '" + args.out +
          "' holds results for a different configuration (see meta.json); "
          "use a fresh directory or delete the old results");
    }
  } else {
    std::ofstream out(meta_path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write '" + meta_path + "'");
    }
    out << effective;
  }

  const std::vector<ScenarioSpec> grid = make_grid(config);
  std::cout << "seed: " << config.seed << '\n';
  std::cout << "scenarios: " << grid.size() << " (reps " << config.reps
            << ", m " << config.m << ", parallelism " << args.parallelism
            << ")\n";

  GridRunOptions options;
  options.parallelism = args.parallelism;
  options.result_dir = args.out;
  const std::vector<ScenarioStats> results =
      run_grid(grid, config.estimators, options);

  const std::string results_path = (fs::path(args.out) / "results.csv").string();
  write_result_csv(results_path, results);
  std::cout << "results: " << results_path << '\n';
  return 0;
}

struct TabulateArgs {
  std::string results;
  std::string strat;
  double filter_gamma = 0.0;
  bool has_filter = false;
  std::string stats;
  std::string format = "markdown";
  std::string out;
};

int cmd_tabulate(const TabulateArgs& args) {
  namespace fs = std::filesystem;
  std::string path = args.results;
  if (fs::is_directory(path)) {
    path = (fs::path(path) / "results.csv").string();
  }
  const std::vector<ScenarioStats> results = read_result_csv(path);

  const std::optional<StratVariable> variable =
      strat_variable_from_name(args.strat);
  if (!variable) {
    throw std::runtime_error("unknown stratification variable '" + args.strat +
                             "' (expected one of T, n, p, rho, gamma)");
  }

  std::optional<double> filter;
  if (args.has_filter) filter = args.filter_gamma;

  std::string stats = args.stats;
  if (stats.empty()) stats = args.has_filter ? "std,bias" : "std,rmse";
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (start <= stats.size()) {
    std::size_t comma = stats.find(',', start);
    if (comma == std::string::npos) comma = stats.size();
    const std::string token = stats.substr(start, comma - start);
    if (!token.empty()) fields.push_back(token);
    start = comma + 1;
  }

  const StratifiedTable table = stratify(results, *variable, filter);

  std::ostringstream rendered;
  if (args.format == "csv") {
    render_stratified_csv(rendered, table, fields);
  } else if (args.format == "markdown") {
    render_stratified_markdown(rendered, table, fields);
  } else {
    throw std::runtime_error("unknown format '" + args.format +
                             "' (expected csv or markdown)");
  }

  if (args.out.empty()) {
    std::cout << rendered.str();
  } else {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot open '" + args.out + "' for writing");
    }
    out << rendered.str();
    if (!out) throw std::runtime_error("write failed for '" + args.out + "'");
  }
  return 0;
}

int cmd_bayes_sign(std::int64_t d1, std::int64_t n1, std::int64_t d2,
                   std::int64_t n2) {
  const double prob = bayes_sign_prob(d1, n1, d2, n2);
  const double sign = bayes_sign(d1, n1, d2, n2);
  char buf[64];
  std::snprintf(buf, sizeof buf, "bayes_sign_prob = %.12g\n", prob);
  std::cout << buf;
  std::snprintf(buf, sizeof buf, "bayes_sign = %.12g\n", sign);
  std::cout << buf;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Two-sector event-risk model: panel simulation, inter-sector "
      "correlation estimation, and Monte Carlo study tooling"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Simulate a two-sector event-count panel");
  simulate->add_option("--T", sim.T, "Number of observation dates (>= 2)")
      ->required();
  simulate->add_option("--n", sim.n, "Sector A cohort size per date")
      ->required();
  simulate->add_option("--p", sim.p, "Sector A event probability")->required();
  simulate->add_option("--rho", sim.rho, "Sector A intra correlation")
      ->required();
  simulate->add_option("--gamma", sim.gamma, "Inter-sector correlation")
      ->required();
  simulate->add_option("--p2,--ptilde", sim.p_tilde,
                       "Sector B event probability (default: --p)");
  simulate->add_option("--rho2,--rhotilde", sim.rho_tilde,
                       "Sector B intra correlation (default: --rho)");
  simulate->add_option("--n2,--ntilde", sim.n_tilde,
                       "Sector B cohort size (default: --n)");
  simulate->add_option("--seed", sim.seed, "Random seed (default 1)");
  simulate->add_option("--out", sim.out, "Output panel CSV path")->required();

  EstimateArgs est;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "Estimate the inter-sector correlation from a panel CSV");
  estimate->add_option("--in", est.in, "Input panel CSV")->required();
  estimate->add_option(
      "--estimators", est.estimators,
      "Comma-separated estimators (IMM, IM2, IM3, MAD, DMM, MAX, KEN, SPE, "
      "or 'all'; default IMM)");
  estimate->add_option("--m", est.m,
                       "Simulations per bias-correction step (IM2/IM3)");
  estimate->add_option("--seed", est.seed,
                       "Random seed for bias correction (default 1)");
  estimate->add_option("--out", est.out,
                       "Report CSV path (default: standard output)");

  StudyArgs study;
  CLI::App* study_cmd =
      app.add_subcommand("study", "Run a Monte Carlo study grid");
  study_cmd->add_option("--config", study.config, "Grid config JSON")
      ->required();
  study_cmd->add_option("--out", study.out, "Result directory")->required();
  study_cmd->add_option("--parallelism", study.parallelism,
                        "Worker threads (default 1)");
  study_cmd->add_option("--estimators", study.estimators,
                        "Override the config's estimator list");
  study_cmd->add_option("--reps", study.reps,
                        "Override the config's replication count");
  study_cmd->add_option("--m", study.m,
                        "Override the config's bias-correction m");
  study_cmd->add_option("--seed", study.seed, "Override the config's seed");

  TabulateArgs tab;
  CLI::App* tabulate = app.add_subcommand(
      "tabulate", "Render stratified summary tables from study results");
  tabulate
      ->add_option("--results", tab.results,
                   "results.csv path or study output directory")
      ->required();
  tabulate
      ->add_option("--strat", tab.strat,
                   "Stratification variable: T, n, p, rho, gamma")
      ->required();
  CLI::Option* filter_opt = tabulate->add_option(
      "--filter-gamma", tab.filter_gamma,
      "Keep only scenarios at this gamma level before stratifying");
  tabulate->add_option("--stats", tab.stats,
                       "Comma-separated statistics (bias, std, rmse, min, "
                       "q05, q25, q50, q75, q95, max, degenerate); default "
                       "std,rmse (std,bias with --filter-gamma)");
  tabulate->add_option("--format", tab.format, "csv or markdown (default)");
  tabulate->add_option("--out", tab.out, "Output path (default: stdout)");

  std::int64_t d1 = 0, n1 = 0, d2 = 0, n2 = 0;
  CLI::App* bayes = app.add_subcommand(
      "bayes-sign",
      "Posterior probability that the first sector's event rate exceeds the "
      "second's, from one count observation per sector");
  bayes->add_option("d1", d1, "Events in sector 1")->required();
  bayes->add_option("n1", n1, "Cohort size in sector 1")->required();
  bayes->add_option("d2", d2, "Events in sector 2")->required();
  bayes->add_option("n2", n2, "Cohort size in sector 2")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (estimate->parsed()) return cmd_estimate(est);
    if (study_cmd->parsed()) return cmd_study(study);
    if (tabulate->parsed()) {
      tab.has_filter = filter_opt->count() > 0;
      return cmd_tabulate(tab);
    }
    if (bayes->parsed()) return cmd_bayes_sign(d1, n1, d2, n2);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
