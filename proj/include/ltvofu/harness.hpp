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

#ifndef LTVOFU_HARNESS_HPP_
#define LTVOFU_HARNESS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltvofu/dynamics.hpp"
#include "ltvofu/ofu.hpp"
#include "ltvofu/regret.hpp"

namespace ltvofu {

/// Invalid configuration; `key()` names the offending setting.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// `--help` was given; carries the usage text.
class HelpRequested : public std::exception {
 public:
  explicit HelpRequested(std::string text) : text_(std::move(text)) {}
  const char* what() const noexcept override { return "help requested"; }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

struct ExperimentConfig {
  Preset env = Preset::kSwitching;
  int horizon = 100;
  int episodes = 100;
  double noise_scale = 0.1;
  std::vector<Algorithm> algorithms = {Algorithm::kROfu, Algorithm::kSwOfu, Algorithm::kOracleLqr};
  OfuConfig ofu;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::string out_dir = "results";
  int jobs = 1;
  std::optional<CustomSchedule> custom;

  void validate() const;
};

/// CLI tokens (without the program name). Flags override `--config` file
/// entries, which override the defaults.
ExperimentConfig parse_config(const std::vector<std::string>& args);

struct RunResult {
  Algorithm algorithm = Algorithm::kZero;
  std::uint64_t seed = 0;
  RunRecord record;
  RegretLedger ledger;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

/// Runs in canonical (algorithm, seed) order regardless of cfg.jobs.
struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunResult> runs;

  bool all_ok() const;
};

ExperimentResult run_sweep(const ExperimentConfig& cfg);

void write_steps_csv(std::ostream& os, const ExperimentResult& result);
void write_regret_csv(std::ostream& os, const ExperimentResult& result);
void write_summary_csv(std::ostream& os, const ExperimentResult& result);

struct AlgorithmSummary {
  std::string algorithm;
  double final_mean_regret = 0.0;
  double final_stderr_regret = 0.0;
  double mean_step_cost = 0.0;
  double growth = 0.0;  // NaN when the mean regret has no positive tail
};

std::vector<AlgorithmSummary> summarize(const ExperimentResult& result);

/// Runs the sweep, writes steps.csv, regret.csv and summary.csv into
/// cfg.out_dir and prints one summary line per algorithm.
/// Returns 0 on success, 2 if any run failed. Throws on I/O failure.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// CLI entry point; exit status 0 / 1 (config error) / 2 (run failure).
int cli_main(int argc, const char* const* argv);

}  // namespace ltvofu

#endif  // LTVOFU_HARNESS_HPP_
