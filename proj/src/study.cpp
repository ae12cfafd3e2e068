#include "sectorcorr/study.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "sectorcorr/model.hpp"
#include "sectorcorr/panel.hpp"
#include "sectorcorr/rng.hpp"
#include "sectorcorr/simulate.hpp"

namespace sectorcorr {

namespace {

constexpr int kMethodCount = 8;

std::string format_double(double value) {
  std::array<char, 40> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string format_int(std::int64_t value) {
  std::array<char, 24> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

double parse_double_field(std::string_view text, const std::string& where) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::runtime_error(where + ": bad number '" + std::string(text) +
                             "'");
  }
  return value;
}

std::int64_t parse_int_field(std::string_view text, const std::string& where) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::runtime_error(where + ": bad integer '" + std::string(text) +
                             "'");
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::vector<Method> canonical_methods(std::span<const Method> methods) {
  std::vector<Method> out(methods.begin(), methods.end());
  std::sort(out.begin(), out.end(), [](Method a, Method b) {
    return static_cast<int>(a) < static_cast<int>(b);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const char* const kResultHeader =
    "T,n,p,rho,gamma,estimator,bias,std,rmse,min,q05,q25,q50,q75,q95,max,"
    "degenerate_count";

}  // namespace

void validate(const ScenarioSpec& spec) {
  if (spec.T < 2) throw std::domain_error("scenario: need T >= 2");
  if (spec.n < 1) throw std::domain_error("scenario: need n >= 1");
  if (!(spec.p > 0.0 && spec.p < 1.0)) {
    throw std::domain_error("scenario: need p in (0, 1)");
  }
  if (!(spec.rho > 0.0 && spec.rho < 1.0)) {
    throw std::domain_error("scenario: need rho in (0, 1)");
  }
  if (!(spec.gamma >= -1.0 && spec.gamma <= 1.0)) {
    throw std::domain_error("scenario: need gamma in [-1, 1]");
  }
  if (spec.reps < 1) throw std::domain_error("scenario: need reps >= 1");
  if (spec.m < 1) throw std::domain_error("scenario: need m >= 1");
  if (spec.scenario_id < 0) {
    throw std::domain_error("scenario: need scenario_id >= 0");
  }
}

GridConfig parse_grid_config(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("grid config: ") + e.what());
  }
  if (!doc.is_object()) {
    throw std::runtime_error("grid config: top level must be a JSON object");
  }

  static const std::set<std::string> known_keys = {
      "T", "n", "p", "rho", "gamma", "reps", "m", "seed", "estimators"};
  for (const auto& item : doc.items()) {
    if (known_keys.count(item.key()) == 0) {
      throw std::runtime_error("grid config: unknown key '" + item.key() +
                               "'");
    }
  }

  auto level_array = [&doc](const char* key) -> const nlohmann::json& {
    if (!doc.contains(key)) {
      throw std::runtime_error(std::string("grid config: missing key '") +
                               key + "'");
    }
    const nlohmann::json& node = doc.at(key);
    if (!node.is_array() || node.empty()) {
      throw std::runtime_error(std::string("grid config: '") + key +
                               "' must be a nonempty array");
    }
    return node;
  };

  auto int_levels = [&level_array](const char* key) {
    std::vector<std::int64_t> out;
    for (const nlohmann::json& node : level_array(key)) {
      if (!node.is_number_integer()) {
        throw std::runtime_error(std::string("grid config: '") + key +
                                 "' entries must be integers");
      }
      out.push_back(node.get<std::int64_t>());
    }
    return out;
  };
  auto double_levels = [&level_array](const char* key) {
    std::vector<double> out;
    for (const nlohmann::json& node : level_array(key)) {
      if (!node.is_number()) {
        throw std::runtime_error(std::string("grid config: '") + key +
                                 "' entries must be numbers");
      }
      out.push_back(node.get<double>());
    }
    return out;
  };

  GridConfig cfg;
  cfg.T = int_levels("T");
  cfg.n = int_levels("n");
  cfg.p = double_levels("p");
  cfg.rho = double_levels("rho");
  cfg.gamma = double_levels("gamma");

  auto reject_duplicates = [](const auto& levels, const char* key) {
    auto sorted = levels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::runtime_error(std::string("grid config: duplicate level in '") +
                               key + "'");
    }
  };
  reject_duplicates(cfg.T, "T");
  reject_duplicates(cfg.n, "n");
  reject_duplicates(cfg.p, "p");
  reject_duplicates(cfg.rho, "rho");
  reject_duplicates(cfg.gamma, "gamma");

  for (std::int64_t t : cfg.T) {
    if (t < 2) throw std::runtime_error("grid config: need T >= 2");
  }
  for (std::int64_t n : cfg.n) {
    if (n < 1) throw std::runtime_error("grid config: need n >= 1");
  }
  for (double p : cfg.p) {
    if (!(p > 0.0 && p < 1.0)) {
      throw std::runtime_error("grid config: need p in (0, 1)");
    }
  }
  for (double rho : cfg.rho) {
    if (!(rho > 0.0 && rho < 1.0)) {
      throw std::runtime_error("grid config: need rho in (0, 1)");
    }
  }
  for (double gamma : cfg.gamma) {
    if (!(gamma >= -1.0 && gamma <= 1.0)) {
      throw std::runtime_error("grid config: need gamma in [-1, 1]");
    }
  }

  if (doc.contains("reps")) {
    if (!doc["reps"].is_number_integer()) {
      throw std::runtime_error("grid config: 'reps' must be an integer");
    }
    cfg.reps = doc["reps"].get<std::int64_t>();
  }
  if (doc.contains("m")) {
    if (!doc["m"].is_number_integer()) {
      throw std::runtime_error("grid config: 'm' must be an integer");
    }
    cfg.m = doc["m"].get<std::int64_t>();
  }
  if (cfg.reps < 1) throw std::runtime_error("grid config: need reps >= 1");
  if (cfg.m < 1) throw std::runtime_error("grid config: need m >= 1");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() ||
        (doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned() &&
         doc["seed"].get<std::int64_t>() < 0)) {
      throw std::runtime_error(
          "grid config: 'seed' must be a nonnegative integer");
    }
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }

  if (doc.contains("estimators")) {
    const nlohmann::json& node = doc["estimators"];
    if (!node.is_array() || node.empty()) {
      throw std::runtime_error(
          "grid config: 'estimators' must be a nonempty array of names");
    }
    std::vector<Method> methods;
    for (const nlohmann::json& entry : node) {
      if (!entry.is_string()) {
        throw std::runtime_error(
            "grid config: 'estimators' entries must be strings");
      }
      const std::string name = entry.get<std::string>();
      const std::optional<Method> method = method_from_name(name);
      if (!method) {
        throw std::runtime_error("grid config: unknown estimator '" + name +
                                 "'");
      }
      if (std::find(methods.begin(), methods.end(), *method) !=
          methods.end()) {
        throw std::runtime_error("grid config: duplicate estimator '" + name +
                                 "'");
      }
      methods.push_back(*method);
    }
    cfg.estimators = canonical_methods(methods);
  } else {
    cfg.estimators = {Method::IMM, Method::IM2, Method::IM3, Method::MAD,
                      Method::DMM, Method::MAX, Method::KEN};
  }
  return cfg;
}

GridConfig load_grid_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("grid config: cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_grid_config(buffer.str());
}

std::string grid_config_to_json(const GridConfig& config) {
  nlohmann::ordered_json doc;
  doc["T"] = config.T;
  doc["n"] = config.n;
  doc["p"] = config.p;
  doc["rho"] = config.rho;
  doc["gamma"] = config.gamma;
  doc["reps"] = config.reps;
  doc["m"] = config.m;
  doc["seed"] = config.seed;
  std::vector<std::string> names;
  for (Method method : config.estimators) {
    names.emplace_back(method_name(method));
  }
  doc["estimators"] = names;
  return doc.dump(2) + "\n";
}

std::vector<ScenarioSpec> make_grid(const GridConfig& config) {
  std::vector<ScenarioSpec> grid;
  grid.reserve(config.T.size() * config.n.size() * config.p.size() *
               config.rho.size() * config.gamma.size());
  std::int64_t id = 0;
  for (std::int64_t T : config.T) {
    for (std::int64_t n : config.n) {
      for (double p : config.p) {
        for (double rho : config.rho) {
          for (double gamma : config.gamma) {
            ScenarioSpec spec;
            spec.T = T;
            spec.n = n;
            spec.p = p;
            spec.rho = rho;
            spec.gamma = gamma;
            spec.reps = config.reps;
            spec.m = config.m;
            spec.seed = config.seed;
            spec.scenario_id = id++;
            grid.push_back(spec);
          }
        }
      }
    }
  }
  return grid;
}

ScenarioStats run_scenario(const ScenarioSpec& spec,
                           std::span<const Method> estimators) {
  validate(spec);
  const std::vector<Method> methods = canonical_methods(estimators);
  if (methods.empty()) {
    throw std::invalid_argument("run_scenario: no estimators selected");
  }

  PairModel model;
  model.sector_a = {spec.p, spec.rho};
  model.sector_b = {spec.p, spec.rho};
  model.gamma = spec.gamma;
  validate(model);

  auto want = [&methods](Method method) {
    return std::find(methods.begin(), methods.end(), method) != methods.end();
  };
  const bool need_imm = want(Method::IMM) || want(Method::MAX);
  const bool need_path = want(Method::IM2) || want(Method::IM3);
  const int path_steps = want(Method::IM3) ? 3 : 2;
  const bool need_dmm = want(Method::DMM) || want(Method::MAX);
  const bool need_cs = need_imm || need_path || want(Method::MAD);

  struct Accumulator {
    std::vector<double> values;
    std::int64_t degenerate = 0;
  };
  std::array<Accumulator, kMethodCount> acc;
  for (Method method : methods) {
    acc[static_cast<std::size_t>(method)].values.reserve(
        static_cast<std::size_t>(spec.reps));
  }
  auto record = [&acc](const GammaEstimate& est) {
    Accumulator& a = acc[static_cast<std::size_t>(est.method)];
    a.values.push_back(est.value);
    if (est.degenerate) ++a.degenerate;
  };

  const RngStream scenario_stream =
      RngStream(spec.seed).split(static_cast<std::uint64_t>(spec.scenario_id));
  for (std::int64_t rep = 0; rep < spec.reps; ++rep) {
    const RngStream rep_stream =
        scenario_stream.split(static_cast<std::uint64_t>(rep));
    RngStream panel_rng = rep_stream.split(0);
    const Panel panel = simulate_panel(model, spec.T, spec.n, spec.n, panel_rng);

    CrossSectionEstimates cs;
    if (need_cs) cs = cross_section(panel);

    GammaEstimate imm_est;
    if (need_imm) imm_est = imm(cs);
    if (want(Method::IMM)) record(imm_est);

    if (need_path) {
      const RngStream bias_rng = rep_stream.split(1);
      const std::vector<GammaEstimate> path = imm_bias_correction_path(
          panel, path_steps, static_cast<int>(spec.m), bias_rng);
      if (want(Method::IM2)) record(path.at(1));
      if (want(Method::IM3)) record(path.at(2));
    }

    if (want(Method::MAD)) record(mad_estimator(cs).first);

    GammaEstimate dmm_est;
    if (need_dmm) dmm_est = dmm(panel).first;
    if (want(Method::DMM)) record(dmm_est);
    if (want(Method::MAX)) record(max_estimator(imm_est, dmm_est));

    if (want(Method::KEN)) record(ken_gamma(panel));
    if (want(Method::SPE)) record(spearman_gamma(panel));
  }

  ScenarioStats out;
  out.spec = spec;
  out.per_estimator.reserve(methods.size());
  for (Method method : methods) {
    Accumulator& a = acc[static_cast<std::size_t>(method)];
    EstimatorStats es;
    es.method = method;
    es.stats = summarize(std::move(a.values), spec.gamma, a.degenerate);
    out.per_estimator.push_back(std::move(es));
  }
  return out;
}

void write_result_csv(std::ostream& out,
                      std::span<const ScenarioStats> results) {
  out << kResultHeader << '\n';
  for (const ScenarioStats& scenario : results) {
    const ScenarioSpec& spec = scenario.spec;
    for (const EstimatorStats& es : scenario.per_estimator) {
      const SummaryStats& s = es.stats;
      out << format_int(spec.T) << ',' << format_int(spec.n) << ','
          << format_double(spec.p) << ',' << format_double(spec.rho) << ','
          << format_double(spec.gamma) << ',' << method_name(es.method) << ','
          << format_double(s.bias) << ',' << format_double(s.std_dev) << ','
          << format_double(s.rmse) << ',' << format_double(s.min) << ','
          << format_double(s.q05) << ',' << format_double(s.q25) << ','
          << format_double(s.q50) << ',' << format_double(s.q75) << ','
          << format_double(s.q95) << ',' << format_double(s.max) << ','
          << format_int(s.degenerate_count) << '\n';
    }
  }
}

void write_result_csv(const std::string& path,
                      std::span<const ScenarioStats> results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  write_result_csv(out, results);
  out.flush();
  if (!out) {
    throw std::runtime_error("write failed for '" + path + "'");
  }
}

std::vector<ScenarioStats> read_result_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("result CSV: empty input");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultHeader) {
    throw std::runtime_error("result CSV: unexpected header '" + line + "'");
  }

  std::vector<ScenarioStats> results;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "result CSV line " + std::to_string(line_no);
    const std::vector<std::string_view> fields = split_fields(line);
    if (fields.size() != 17) {
      throw std::runtime_error(where + ": expected 17 fields, got " +
                               std::to_string(fields.size()));
    }

    ScenarioSpec spec;
    spec.T = parse_int_field(fields[0], where);
    spec.n = parse_int_field(fields[1], where);
    spec.p = parse_double_field(fields[2], where);
    spec.rho = parse_double_field(fields[3], where);
    spec.gamma = parse_double_field(fields[4], where);

    const std::optional<Method> method = method_from_name(fields[5]);
    if (!method) {
      throw std::runtime_error(where + ": unknown estimator '" +
                               std::string(fields[5]) + "'");
    }

    EstimatorStats es;
    es.method = *method;
    es.stats.bias = parse_double_field(fields[6], where);
    es.stats.std_dev = parse_double_field(fields[7], where);
    es.stats.rmse = parse_double_field(fields[8], where);
    es.stats.min = parse_double_field(fields[9], where);
    es.stats.q05 = parse_double_field(fields[10], where);
    es.stats.q25 = parse_double_field(fields[11], where);
    es.stats.q50 = parse_double_field(fields[12], where);
    es.stats.q75 = parse_double_field(fields[13], where);
    es.stats.q95 = parse_double_field(fields[14], where);
    es.stats.max = parse_double_field(fields[15], where);
    es.stats.degenerate_count = parse_int_field(fields[16], where);

    const bool same_scenario =
        !results.empty() && results.back().spec.T == spec.T &&
        results.back().spec.n == spec.n && results.back().spec.p == spec.p &&
        results.back().spec.rho == spec.rho &&
        results.back().spec.gamma == spec.gamma;
    if (!same_scenario) {
      ScenarioStats scenario;
      scenario.spec = spec;
      results.push_back(std::move(scenario));
    }
    for (const EstimatorStats& existing : results.back().per_estimator) {
      if (existing.method == es.method) {
        throw std::runtime_error(where + ": duplicate estimator row");
      }
    }
    results.back().per_estimator.push_back(es);
  }
  return results;
}

std::vector<ScenarioStats> read_result_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  return read_result_csv(in);
}

namespace {

bool stored_result_matches(const ScenarioStats& stored,
                           const ScenarioSpec& spec,
                           const std::vector<Method>& methods) {
  if (stored.spec.T != spec.T || stored.spec.n != spec.n ||
      stored.spec.p != spec.p || stored.spec.rho != spec.rho ||
      stored.spec.gamma != spec.gamma) {
    return false;
  }
  if (stored.per_estimator.size() != methods.size()) return false;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (stored.per_estimator[i].method != methods[i]) return false;
  }
  return true;
}

}  // namespace

std::vector<ScenarioStats> run_grid(std::span<const ScenarioSpec> grid,
                                    std::span<const Method> estimators,
                                    const GridRunOptions& options) {
  const std::vector<Method> methods = canonical_methods(estimators);
  if (methods.empty()) {
    throw std::invalid_argument("run_grid: no estimators selected");
  }
  for (const ScenarioSpec& spec : grid) validate(spec);

  namespace fs = std::filesystem;
  const bool store = !options.result_dir.empty();
  if (store) fs::create_directories(options.result_dir);

  std::vector<std::optional<ScenarioStats>> slots(grid.size());
  std::atomic<std::size_t> next_index{0};
  std::mutex log_mutex;
  std::string first_error;

  auto log_note = [&log_mutex](const std::string& message) {
    const std::lock_guard<std::mutex> lock(log_mutex);
    std::cerr << "note: " << message << '\n';
  };

  auto scenario_path = [&options](std::int64_t id) {
    char name[32];
    std::snprintf(name, sizeof name, "scenario_%06lld.csv",
                  static_cast<long long>(id));
    return (fs::path(options.result_dir) / name).string();
  };

  auto work = [&]() {
    while (true) {
      const std::size_t index = next_index.fetch_add(1);
      if (index >= grid.size()) return;
      const ScenarioSpec& spec = grid[index];
      try {
        std::optional<ScenarioStats> loaded;
        std::string path;
        if (store) {
          path = scenario_path(spec.scenario_id);
          std::error_code ec;
          if (fs::exists(path, ec)) {
            try {
              std::vector<ScenarioStats> parsed = read_result_csv(path);
              if (parsed.size() == 1 &&
                  stored_result_matches(parsed.front(), spec, methods)) {
                parsed.front().spec = spec;
                loaded = std::move(parsed.front());
              } else {
                log_note("stored result " + path +
                         " does not match the current grid; recomputing");
              }
            } catch (const std::exception& e) {
              log_note("could not read " + path + " (" + e.what() +
                       "); recomputing");
            }
          }
        }

        ScenarioStats result =
            loaded ? std::move(*loaded) : run_scenario(spec, methods);

        if (store && !loaded) {
          // Write-then-rename keeps partially written files out of the store.
          const std::string tmp = path + ".tmp";
          try {
            write_result_csv(tmp, std::span<const ScenarioStats>(&result, 1));
            fs::rename(tmp, path);
          } catch (const std::exception& e) {
            std::error_code ec;
            fs::remove(tmp, ec);
            log_note("could not store " + path + " (" + e.what() + ")");
          }
        }
        slots[index] = std::move(result);
      } catch (const std::exception& e) {
        const std::lock_guard<std::mutex> lock(log_mutex);
        if (first_error.empty()) {
          first_error = "scenario " + std::to_string(spec.scenario_id) + ": " +
                        e.what();
        }
      }
    }
  };

  const int worker_count = std::max(
      1, std::min<int>(options.parallelism,
                       static_cast<int>(std::min<std::size_t>(
                           grid.size(), std::numeric_limits<int>::max()))));
  if (worker_count <= 1) {
    work();
  } else {
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(worker_count));
    for (int i = 0; i < worker_count; ++i) workers.emplace_back(work);
    for (std::thread& worker : workers) worker.join();
  }

  if (!first_error.empty()) throw std::runtime_error(first_error);

  std::vector<ScenarioStats> results;
  results.reserve(grid.size());
  for (std::optional<ScenarioStats>& slot : slots) {
    results.push_back(std::move(*slot));
  }
  return results;
}

std::optional<StratVariable> strat_variable_from_name(std::string_view name) {
  if (name == "T") return StratVariable::T;
  if (name == "n") return StratVariable::n;
  if (name == "p") return StratVariable::p;
  if (name == "rho") return StratVariable::rho;
  if (name == "gamma") return StratVariable::gamma;
  return std::nullopt;
}

std::string_view strat_variable_name(StratVariable variable) {
  switch (variable) {
    case StratVariable::T: return "T";
    case StratVariable::n: return "n";
    case StratVariable::p: return "p";
    case StratVariable::rho: return "rho";
    case StratVariable::gamma: return "gamma";
  }
  return "?";
}

std::optional<double> stat_field(const AveragedStats& stats,
                                 std::string_view name) {
  if (name == "bias") return stats.bias;
  if (name == "std") return stats.std_dev;
  if (name == "rmse") return stats.rmse;
  if (name == "min") return stats.min;
  if (name == "q05") return stats.q05;
  if (name == "q25") return stats.q25;
  if (name == "q50") return stats.q50;
  if (name == "q75") return stats.q75;
  if (name == "q95") return stats.q95;
  if (name == "max") return stats.max;
  if (name == "degenerate") return stats.degenerate_mean;
  return std::nullopt;
}

namespace {

double level_of(const ScenarioSpec& spec, StratVariable variable) {
  switch (variable) {
    case StratVariable::T: return static_cast<double>(spec.T);
    case StratVariable::n: return static_cast<double>(spec.n);
    case StratVariable::p: return spec.p;
    case StratVariable::rho: return spec.rho;
    case StratVariable::gamma: return spec.gamma;
  }
  return 0.0;
}

std::vector<AveragedStats> average_group(
    const std::vector<const ScenarioStats*>& group, std::size_t n_methods) {
  std::vector<AveragedStats> out(n_methods);
  const double count = static_cast<double>(group.size());
  for (const ScenarioStats* scenario : group) {
    for (std::size_t j = 0; j < n_methods; ++j) {
      const SummaryStats& s = scenario->per_estimator[j].stats;
      AveragedStats& a = out[j];
      a.bias += s.bias;
      a.std_dev += s.std_dev;
      a.rmse += s.rmse;
      a.min += s.min;
      a.q05 += s.q05;
      a.q25 += s.q25;
      a.q50 += s.q50;
      a.q75 += s.q75;
      a.q95 += s.q95;
      a.max += s.max;
      a.degenerate_mean += static_cast<double>(s.degenerate_count);
    }
  }
  for (AveragedStats& a : out) {
    a.bias /= count;
    a.std_dev /= count;
    a.rmse /= count;
    a.min /= count;
    a.q05 /= count;
    a.q25 /= count;
    a.q50 /= count;
    a.q75 /= count;
    a.q95 /= count;
    a.max /= count;
    a.degenerate_mean /= count;
  }
  return out;
}

}  // namespace

StratifiedTable stratify(std::span<const ScenarioStats> results,
                         StratVariable variable,
                         std::optional<double> gamma_filter) {
  if (results.empty()) throw std::runtime_error("stratify: no results");

  std::vector<const ScenarioStats*> subset;
  subset.reserve(results.size());
  for (const ScenarioStats& scenario : results) {
    if (gamma_filter && scenario.spec.gamma != *gamma_filter) continue;
    subset.push_back(&scenario);
  }
  if (subset.empty()) {
    throw std::runtime_error("stratify: gamma filter matched no scenarios");
  }

  const std::size_t n_methods = subset.front()->per_estimator.size();
  std::vector<Method> methods;
  methods.reserve(n_methods);
  for (const EstimatorStats& es : subset.front()->per_estimator) {
    methods.push_back(es.method);
  }
  for (const ScenarioStats* scenario : subset) {
    if (scenario->per_estimator.size() != n_methods) {
      throw std::runtime_error("stratify: results do not share one estimator set");
    }
    for (std::size_t j = 0; j < n_methods; ++j) {
      if (scenario->per_estimator[j].method != methods[j]) {
        throw std::runtime_error(
            "stratify: results do not share one estimator set");
      }
    }
  }

  // The unweighted per-level means are only comparable when every level of
  // the chosen variable is paired with the same set of off-variable cells,
  // i.e. when the (filtered) scenarios form a full factorial grid.
  std::array<std::set<double>, 5> level_sets;
  std::set<std::tuple<double, double, double, double, double>> combos;
  for (const ScenarioStats* scenario : subset) {
    const ScenarioSpec& spec = scenario->spec;
    level_sets[0].insert(static_cast<double>(spec.T));
    level_sets[1].insert(static_cast<double>(spec.n));
    level_sets[2].insert(spec.p);
    level_sets[3].insert(spec.rho);
    level_sets[4].insert(spec.gamma);
    const auto combo = std::make_tuple(static_cast<double>(spec.T),
                                       static_cast<double>(spec.n), spec.p,
                                       spec.rho, spec.gamma);
    if (!combos.insert(combo).second) {
      throw std::runtime_error("stratify: duplicate scenario in results");
    }
  }
  std::size_t expected = 1;
  for (const std::set<double>& levels : level_sets) expected *= levels.size();
  if (subset.size() != expected) {
    throw std::runtime_error(
        "stratify: results are not a full factorial grid (have " +
        std::to_string(subset.size()) + " scenarios, a full grid needs " +
        std::to_string(expected) + ")");
  }

  std::map<double, std::vector<const ScenarioStats*>> groups;
  for (const ScenarioStats* scenario : subset) {
    groups[level_of(scenario->spec, variable)].push_back(scenario);
  }

  StratifiedTable table;
  table.variable = variable;
  table.estimators = methods;
  for (const auto& [level, group] : groups) {
    StratifiedRow row;
    row.level = level;
    row.per_estimator = average_group(group, n_methods);
    table.rows.push_back(std::move(row));
  }
  table.overall.level = 0.0;
  table.overall.per_estimator = average_group(subset, n_methods);
  return table;
}

namespace {

std::vector<std::string> checked_fields(std::span<const std::string> fields) {
  if (fields.empty()) {
    throw std::invalid_argument("table rendering: no statistic fields");
  }
  std::vector<std::string> out;
  AveragedStats probe;
  for (const std::string& field : fields) {
    if (!stat_field(probe, field)) {
      throw std::invalid_argument("table rendering: unknown statistic field '" +
                                  field + "'");
    }
    out.push_back(field);
  }
  return out;
}

std::string format_level(const StratifiedTable& table, double level) {
  if (table.variable == StratVariable::T || table.variable == StratVariable::n) {
    return format_int(static_cast<std::int64_t>(level));
  }
  return format_double(level);
}

std::string fixed6(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return std::string(buf);
}

}  // namespace

void render_stratified_csv(std::ostream& out, const StratifiedTable& table,
                           std::span<const std::string> fields) {
  const std::vector<std::string> cols = checked_fields(fields);
  out << strat_variable_name(table.variable);
  for (const std::string& field : cols) {
    for (Method method : table.estimators) {
      out << ',' << method_name(method) << '_' << field;
    }
  }
  out << '\n';
  auto emit_row = [&](const std::string& label, const StratifiedRow& row) {
    out << label;
    for (const std::string& field : cols) {
      for (std::size_t j = 0; j < table.estimators.size(); ++j) {
        out << ',' << format_double(*stat_field(row.per_estimator[j], field));
      }
    }
    out << '\n';
  };
  for (const StratifiedRow& row : table.rows) {
    emit_row(format_level(table, row.level), row);
  }
  emit_row("overall", table.overall);
}

void render_stratified_markdown(std::ostream& out,
                                const StratifiedTable& table,
                                std::span<const std::string> fields) {
  const std::vector<std::string> cols = checked_fields(fields);

  std::vector<std::string> headers;
  headers.push_back(std::string(strat_variable_name(table.variable)));
  for (const std::string& field : cols) {
    for (Method method : table.estimators) {
      headers.push_back(std::string(method_name(method)) + " " + field);
    }
  }

  std::vector<std::vector<std::string>> body;
  auto make_row = [&](const std::string& label, const StratifiedRow& row) {
    std::vector<std::string> cells;
    cells.push_back(label);
    for (const std::string& field : cols) {
      for (std::size_t j = 0; j < table.estimators.size(); ++j) {
        cells.push_back(fixed6(*stat_field(row.per_estimator[j], field)));
      }
    }
    body.push_back(std::move(cells));
  };
  for (const StratifiedRow& row : table.rows) {
    make_row(format_level(table, row.level), row);
  }
  make_row("overall", table.overall);

  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    widths[c] = headers[c].size();
    for (const std::vector<std::string>& row : body) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }

  auto emit = [&](const std::vector<std::string>& cells) {
    out << '|';
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out << ' ' << cells[c]
          << std::string(widths[c] - cells[c].size() + 1, ' ') << '|';
    }
    out << '\n';
  };
  emit(headers);
  out << '|';
  for (std::size_t c = 0; c < widths.size(); ++c) {
    out << std::string(widths[c] + 2, '-') << '|';
  }
  out << '\n';
  for (const std::vector<std::string>& row : body) emit(row);
}

}  // namespace sectorcorr
