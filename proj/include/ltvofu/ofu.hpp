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

#ifndef LTVOFU_OFU_HPP_
#define LTVOFU_OFU_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ltvofu/dynamics.hpp"
#include "ltvofu/estimation.hpp"
#include "ltvofu/riccati.hpp"
#include "ltvofu/rng.hpp"

namespace ltvofu {

struct OfuConfig {
  int num_candidates = 50;
  double perturb_scale = 0.5;  // half-width of the uniform perturbation
  int epoch_length = 20;       // restart period L
  int window = 20;             // sliding window W
  double lambda = 1.0;
  double delta = 0.1;
  bool evaluate_at_current_state = false;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class Algorithm { kROfu, kSwOfu, kOracleLqr, kZero, kOmniscient };

std::string_view algorithm_label(Algorithm algo);
std::optional<Algorithm> parse_algorithm(std::string_view label);

struct StepLog {
  int episode = 0;
  int step = 0;
  VectorXd x;
  VectorXd u;
  double cost = 0.0;
  int candidate_index = -1;  // -1 for baselines
  double zeta = std::numeric_limits<double>::quiet_NaN();
  double logdet_v = std::numeric_limits<double>::quiet_NaN();
  // Diagnostics for the OFU runs; NaN for baselines.
  double truth_distance = std::numeric_limits<double>::quiet_NaN();  // ||Theta* - center||_V
  double selected_distance = std::numeric_limits<double>::quiet_NaN();
  double selected_cost = std::numeric_limits<double>::quiet_NaN();
  double center_cost = std::numeric_limits<double>::quiet_NaN();
  bool fallback = false;
};

struct RunRecord {
  Algorithm algorithm = Algorithm::kZero;
  std::uint64_t seed = 0;
  int horizon = 0;
  std::vector<StepLog> steps;           // episode-major, step-minor
  std::vector<VectorXd> initial_states;  // x_{k,1}
  std::vector<double> episode_costs;     // sum of the episode's step costs
  int resets = 0;                        // estimator resets (R-OFU)

  std::string_view label() const { return algorithm_label(algorithm); }
  int episodes() const { return static_cast<int>(episode_costs.size()); }
  const StepLog& at(int k, int h) const { return steps[(k - 1) * horizon + (h - 1)]; }
};

/// Center first, then num_candidates - 1 uniformly perturbed copies, each
/// projected into the ellipsoid.
std::vector<Theta> generate_candidates(const ConfidenceEllipsoid& ell, const OfuConfig& cfg,
                                       Rng& rng);

struct OptimisticChoice {
  Theta theta;
  double cost = 0.0;
  std::size_t index = 0;
  MatrixXd gain;          // first-step gain of the selected model
  bool fallback = false;  // every candidate was ill-conditioned
};

/// argmin over candidates of J*(Theta, x_eval) with Theta held constant over
/// the span; lowest index wins ties, ill-conditioned candidates are skipped.
/// When all are skipped, the first candidate (the center) is returned with
/// `fallback` set and an infinite cost.
OptimisticChoice select_optimistic(std::span<const Theta> candidates, const MatrixXd& q,
                                   const MatrixXd& r_cost, int horizon_span,
                                   const VectorXd& x_eval, double noise_scale);

/// Workspace-reusing variant of select_optimistic.
OptimisticChoice select_optimistic(std::span<const Theta> candidates,
                                   ConstantModelEvaluator& evaluator, int horizon_span,
                                   const VectorXd& x_eval, double noise_scale);

/// Restarting OFU: the estimator is reset every epoch_length steps.
RunRecord run_r_ofu(const LtvEnvironment& env, const OfuConfig& cfg, std::uint64_t seed);

/// Sliding-window OFU: the estimator keeps the last `window` transitions.
RunRecord run_sw_ofu(const LtvEnvironment& env, const OfuConfig& cfg, std::uint64_t seed);

/// oracle_lqr, zero_control or omniscient.
RunRecord run_baseline(const LtvEnvironment& env, Algorithm which, std::uint64_t seed);

/// Dispatches on the algorithm.
RunRecord run_algorithm(const LtvEnvironment& env, Algorithm algo, const OfuConfig& cfg,
                        std::uint64_t seed);

}  // namespace ltvofu

#endif  // LTVOFU_OFU_HPP_
