// Copyright 2026 The ltvofu Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ltvofu/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

namespace ltvofu {

namespace {

using Settings = std::map<std::string, std::string>;

// Keys accepted in config files and, with a "--" prefix, on the command line.
const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "env",     "algos",  "episodes", "horizon", "epoch", "window",
      "candidates", "perturb", "lambda", "delta", "noise", "seeds",
      "out",     "jobs",   "eval-at-current-state", "custom-a", "custom-b", "custom-segment"};
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Settings read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "config: cannot open '" + path + "'");
  Settings settings;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", "config: line " + std::to_string(line_no) + " is not key=value");
    }
    std::string key = trim(std::string_view(content).substr(0, eq));
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
      throw ConfigError(key, key + ": unknown config key");
    }
    settings[key] = trim(std::string_view(content).substr(eq + 1));
  }
  return settings;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ConfigError(key, key + ": cannot parse '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key, key + ": expected a boolean, got '" + text + "'");
}

// "1 0.5; 0 1" -> 2x2
MatrixXd parse_matrix(const std::string& key, const std::string& text) {
  std::vector<std::vector<double>> rows;
  for (const std::string& row : split(text, ';')) {
    std::istringstream in(row);
    std::vector<double> values;
    std::string token;
    while (in >> token) values.push_back(parse_number<double>(key, token));
    if (values.empty() || (!rows.empty() && values.size() != rows.front().size())) {
      throw ConfigError(key, key + ": ragged or empty matrix row in '" + text + "'");
    }
    rows.push_back(std::move(values));
  }
  MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

ExperimentConfig config_from_settings(const Settings& s) {
  ExperimentConfig cfg;
  auto has = [&](const char* key) { return s.count(key) > 0; };
  auto get = [&](const char* key) -> const std::string& { return s.at(key); };

  if (has("env")) {
    try {
      cfg.env = parse_preset(get("env"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("env", std::string("env: ") + e.what());
    }
  }
  if (has("algos")) {
    cfg.algorithms.clear();
    for (const std::string& label : split(get("algos"), ',')) {
      const auto algo = parse_algorithm(label);
      if (!algo) throw ConfigError("algos", "algos: unknown algorithm '" + label + "'");
      cfg.algorithms.push_back(*algo);
    }
  }
  if (has("episodes")) cfg.episodes = parse_number<int>("episodes", get("episodes"));
  if (has("horizon")) cfg.horizon = parse_number<int>("horizon", get("horizon"));
  if (has("noise")) cfg.noise_scale = parse_number<double>("noise", get("noise"));
  if (has("epoch")) cfg.ofu.epoch_length = parse_number<int>("epoch", get("epoch"));
  if (has("window")) cfg.ofu.window = parse_number<int>("window", get("window"));
  if (has("candidates")) cfg.ofu.num_candidates = parse_number<int>("candidates", get("candidates"));
  if (has("perturb")) cfg.ofu.perturb_scale = parse_number<double>("perturb", get("perturb"));
  if (has("lambda")) cfg.ofu.lambda = parse_number<double>("lambda", get("lambda"));
  if (has("delta")) cfg.ofu.delta = parse_number<double>("delta", get("delta"));
  if (has("eval-at-current-state")) {
    cfg.ofu.evaluate_at_current_state =
        parse_bool("eval-at-current-state", get("eval-at-current-state"));
  }
  if (has("seeds")) {
    const std::string& text = get("seeds");
    cfg.seeds.clear();
    if (text.find(',') == std::string::npos) {
      const int count = parse_number<int>("seeds", text);
      if (count < 1) throw ConfigError("seeds", "seeds: count must be >= 1");
      for (int i = 0; i < count; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(i));
    } else {
      for (const std::string& item : split(text, ',')) {
        if (item.empty()) continue;
        cfg.seeds.push_back(parse_number<std::uint64_t>("seeds", item));
      }
    }
  }
  if (has("out")) cfg.out_dir = get("out");
  if (has("jobs")) cfg.jobs = parse_number<int>("jobs", get("jobs"));

  if (has("custom-a") || has("custom-b")) {
    if (!has("custom-a") || !has("custom-b")) {
      throw ConfigError(has("custom-a") ? "custom-b" : "custom-a",
                        "custom-a and custom-b must be given together");
    }
    const auto as = split(get("custom-a"), '|');
    const auto bs = split(get("custom-b"), '|');
    if (as.size() != bs.size()) {
      throw ConfigError("custom-b", "custom-b: needs one segment per custom-a segment");
    }
    CustomSchedule custom;
    for (std::size_t i = 0; i < as.size(); ++i) {
      try {
        custom.segments.push_back(
            Theta::from_ab(parse_matrix("custom-a", as[i]), parse_matrix("custom-b", bs[i])));
      } catch (const DimensionError& e) {
        throw ConfigError("custom-b", std::string("custom-b: ") + e.what());
      }
    }
    custom.segment_length =
        has("custom-segment") ? parse_number<int>("custom-segment", get("custom-segment"))
                              : cfg.horizon;
    cfg.custom = std::move(custom);
  }
  cfg.validate();
  return cfg;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& values) {
  MeanStderr out;
  if (values.empty()) return {std::nan(""), std::nan("")};
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    out.stderr_ = std::sqrt(var / static_cast<double>(values.size()));
  }
  return out;
}

// Successful runs of one algorithm, in seed order.
std::vector<const RunResult*> runs_of(const ExperimentResult& result, Algorithm algo) {
  std::vector<const RunResult*> out;
  for (const RunResult& run : result.runs) {
    if (run.algorithm == algo && run.ok()) out.push_back(&run);
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw ConfigError("algos", "algos: at least one algorithm is required");
  if (seeds.empty()) throw ConfigError("seeds", "seeds: at least one seed is required");
  if (horizon < 2) throw ConfigError("horizon", "horizon: must be >= 2");
  if (episodes < 1) throw ConfigError("episodes", "episodes: must be >= 1");
  if (env == Preset::kFrequent && horizon < 20) {
    throw ConfigError("horizon", "horizon: the frequent preset needs H >= 20");
  }
  if (env == Preset::kCustom && !custom) {
    throw ConfigError("env", "env: custom needs custom-a and custom-b");
  }
  if (custom && custom->segment_length < 1) {
    throw ConfigError("custom-segment", "custom-segment: must be >= 1");
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw ConfigError("noise", "noise: must be >= 0");
  }
  if (jobs < 1) throw ConfigError("jobs", "jobs: must be >= 1");
  if (out_dir.empty()) throw ConfigError("out", "out: must not be empty");
  try {
    ofu.validate();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    throw ConfigError(what.substr(0, what.find(':')), what);
  }
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Online control of unknown linear time-varying systems (R-OFU / SW-OFU)", "ltvofu"};
  std::string config_path;
  app.add_option("--config", config_path, "flat key=value config file");

  std::map<std::string, std::string> cli_values;
  std::map<std::string, CLI::Option*> options;
  const std::map<std::string, std::string> help = {
      {"env", "switching|slow|frequent|lti|custom"},
      {"algos", "comma list of r-ofu,sw-ofu,oracle-lqr,zero,omniscient"},
      {"episodes", "number of episodes K"},
      {"horizon", "steps per episode H"},
      {"epoch", "R-OFU epoch length L"},
      {"window", "SW-OFU window W"},
      {"candidates", "OFU candidates m"},
      {"perturb", "half-width of the candidate perturbation"},
      {"lambda", "ridge regularization"},
      {"delta", "confidence level in (0,1)"},
      {"noise", "process noise standard deviation"},
      {"seeds", "comma list of seeds, or a count N meaning 0..N-1"},
      {"out", "output directory"},
      {"jobs", "parallel runs"},
      {"custom-a", "custom A segments, rows ';', segments '|'"},
      {"custom-b", "custom B segments, rows ';', segments '|'"},
      {"custom-segment", "steps per custom segment"},
  };
  for (const std::string& key : known_keys()) {
    if (key == "eval-at-current-state") continue;
    options[key] = app.add_option("--" + key, cli_values[key], help.at(key));
  }
  bool eval_current = false;
  CLI::Option* eval_flag = app.add_flag("--eval-at-current-state", eval_current,
                                        "evaluate the OFU objective at x_{k,h} instead of x_{k,1}");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    std::string what = e.what();
    std::string key;
    if (const auto pos = what.find("--"); pos != std::string::npos) {
      key = what.substr(pos + 2, what.find_first_of(" :=", pos + 2) - pos - 2);
    }
    throw ConfigError(key, what);
  }

  Settings settings;
  if (!config_path.empty()) settings = read_config_file(config_path);
  for (const auto& [key, opt] : options) {
    if (opt->count() > 0) settings[key] = cli_values[key];
  }
  if (eval_flag->count() > 0) settings["eval-at-current-state"] = eval_current ? "true" : "false";
  return config_from_settings(settings);
}

bool ExperimentResult::all_ok() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunResult& r) { return r.ok(); });
}

ExperimentResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  result.config = cfg;
  const std::size_t num_seeds = cfg.seeds.size();
  const std::size_t total = cfg.algorithms.size() * num_seeds;
  result.runs.resize(total);

  auto run_one = [&](std::size_t index) {
    RunResult& slot = result.runs[index];
    slot.algorithm = cfg.algorithms[index / num_seeds];
    slot.seed = cfg.seeds[index % num_seeds];
    try {
      const LtvEnvironment env =
          build_environment(cfg.env, cfg.horizon, cfg.episodes, cfg.noise_scale, slot.seed,
                            cfg.custom ? &*cfg.custom : nullptr);
      slot.record = run_algorithm(env, slot.algorithm, cfg.ofu, slot.seed);
      slot.ledger = make_ledger(slot.record, env);
    } catch (const std::exception& e) {
      slot.error = e.what();
      if (slot.error.empty()) slot.error = "unknown error";
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), total);
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) run_one(i);
    return result;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < total; i = next++) run_one(i);
    });
  }
  pool.clear();  // joins
  return result;
}

void write_steps_csv(std::ostream& os, const ExperimentResult& result) {
  os << "algo,seed,episode,step,cost,u_norm,x_norm,zeta,logdet_v\n";
  for (const RunResult& run : result.runs) {
    if (!run.ok()) continue;
    for (const StepLog& s : run.record.steps) {
      os << run.record.label() << ',' << run.seed << ',' << s.episode << ',' << s.step << ','
         << fmt17(s.cost) << ',' << fmt17(s.u.norm()) << ',' << fmt17(s.x.norm()) << ','
         << fmt17(s.zeta) << ',' << fmt17(s.logdet_v) << '\n';
    }
  }
}

void write_regret_csv(std::ostream& os, const ExperimentResult& result) {
  os << "algo,seed,episode,episode_cost,optimal_cost,regret,cum_regret\n";
  for (const RunResult& run : result.runs) {
    if (!run.ok()) continue;
    const RegretLedger& l = run.ledger;
    for (std::size_t i = 0; i < l.size(); ++i) {
      os << run.record.label() << ',' << run.seed << ',' << (i + 1) << ','
         << fmt17(l.episode_costs[i]) << ',' << fmt17(l.optimal_costs[i]) << ','
         << fmt17(l.regret(i)) << ',' << fmt17(l.cumulative[i]) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& os, const ExperimentResult& result) {
  os << "algo,episode,mean_cum_regret,stderr_cum_regret,mean_cost\n";
  for (Algorithm algo : result.config.algorithms) {
    const auto runs = runs_of(result, algo);
    if (runs.empty()) continue;
    for (int k = 0; k < result.config.episodes; ++k) {
      std::vector<double> cum;
      std::vector<double> cost;
      for (const RunResult* run : runs) {
        cum.push_back(run->ledger.cumulative[k]);
        cost.push_back(run->ledger.episode_costs[k]);
      }
      const MeanStderr c = mean_stderr(cum);
      os << algorithm_label(algo) << ',' << (k + 1) << ',' << fmt17(c.mean) << ','
         << fmt17(c.stderr_) << ',' << fmt17(mean_stderr(cost).mean) << '\n';
    }
  }
}

std::vector<AlgorithmSummary> summarize(const ExperimentResult& result) {
  std::vector<AlgorithmSummary> out;
  const auto& cfg = result.config;
  for (Algorithm algo : cfg.algorithms) {
    const auto runs = runs_of(result, algo);
    if (runs.empty()) continue;
    AlgorithmSummary s;
    s.algorithm = std::string(algorithm_label(algo));
    std::vector<double> finals;
    double cost_sum = 0.0;
    std::vector<double> mean_curve(static_cast<std::size_t>(cfg.episodes), 0.0);
    for (const RunResult* run : runs) {
      finals.push_back(run->ledger.final_regret());
      for (double c : run->ledger.episode_costs) cost_sum += c;
      for (std::size_t k = 0; k < mean_curve.size(); ++k) {
        mean_curve[k] += run->ledger.cumulative[k] / static_cast<double>(runs.size());
      }
    }
    const MeanStderr f = mean_stderr(finals);
    s.final_mean_regret = f.mean;
    s.final_stderr_regret = f.stderr_;
    s.mean_step_cost =
        cost_sum / (static_cast<double>(runs.size()) * cfg.episodes * cfg.horizon);
    try {
      s.growth = growth_exponent(mean_curve);
    } catch (const std::invalid_argument&) {
      s.growth = std::nan("");
    }
    out.push_back(std::move(s));
  }
  return out;
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  const ExperimentResult result = run_sweep(cfg);
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  auto write = [&](const char* name, void (*writer)(std::ostream&, const ExperimentResult&)) {
    const fs::path path = fs::path(cfg.out_dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    writer(out, result);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path.string());
  };
  write("steps.csv", write_steps_csv);
  write("regret.csv", write_regret_csv);
  write("summary.csv", write_summary_csv);

  for (const RunResult& run : result.runs) {
    if (!run.ok()) {
      log << "run failed: algo=" << algorithm_label(run.algorithm) << " seed=" << run.seed << ": "
          << run.error << '\n';
    }
  }
  for (const AlgorithmSummary& s : summarize(result)) {
    char line[256];
    std::snprintf(line, sizeof line,
                  "%-11s final cum. regret %.6g +/- %.3g  mean step cost %.6g  growth %.3f",
                  s.algorithm.c_str(), s.final_mean_regret, s.final_stderr_regret,
                  s.mean_step_cost, s.growth);
    log << line << '\n';
  }
  return result.all_ok() ? 0 : 2;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  ExperimentConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const HelpRequested& h) {
    std::cout << h.text();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
  try {
    return run_experiment(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace ltvofu
