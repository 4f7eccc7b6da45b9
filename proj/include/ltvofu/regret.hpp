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

#ifndef LTVOFU_REGRET_HPP_
#define LTVOFU_REGRET_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ltvofu/dynamics.hpp"
#include "ltvofu/ofu.hpp"

namespace ltvofu {

/// Per-episode realized and optimal costs with the running dynamic regret.
struct RegretLedger {
  std::vector<double> episode_costs;
  std::vector<double> optimal_costs;
  std::vector<double> cumulative;
  std::string algorithm;
  std::uint64_t seed = 0;

  std::size_t size() const { return cumulative.size(); }
  double regret(std::size_t i) const { return episode_costs[i] - optimal_costs[i]; }
  double final_regret() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

/// Expected cost of the optimal time-varying policy from x1 in episode k.
double episode_optimal_cost(const LtvEnvironment& env, int k, const VectorXd& x1);

/// Appends episodes [first_episode, first_episode + count) of `record`.
/// The default covers the whole record, which must match env.episodes().
void accumulate(RegretLedger& ledger, const RunRecord& record, const LtvEnvironment& env,
                int first_episode = 1, int count = -1);

RegretLedger make_ledger(const RunRecord& record, const LtvEnvironment& env);

/// Per-episode budgets plus the jumps between consecutive episodes.
double total_variation_budget(const LtvEnvironment& env);

/// round((H K)^{2/3} B^{-2/3}) clamped to [1, H K].
int optimal_epoch_length(int horizon, int episodes, double total_variation);

/// Least-squares slope of ln(max(c_k, 1e-9)) on ln k over the second half.
double growth_exponent(std::span<const double> cumulative);

}  // namespace ltvofu

#endif  // LTVOFU_REGRET_HPP_
