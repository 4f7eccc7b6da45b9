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

#include "ltvofu/regret.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ltvofu/riccati.hpp"

namespace ltvofu {

double episode_optimal_cost(const LtvEnvironment& env, int k, const VectorXd& x1) {
  const RiccatiSolution sol = backward_recursion(env.episode_schedule(k), env.q(), env.r_cost());
  return optimal_cost(sol, x1, env.noise_scale());
}

void accumulate(RegretLedger& ledger, const RunRecord& record, const LtvEnvironment& env,
                int first_episode, int count) {
  if (count < 0) {
    if (record.episodes() != env.episodes()) {
      throw std::invalid_argument("record covers " + std::to_string(record.episodes()) +
                                  " episodes but the environment has " +
                                  std::to_string(env.episodes()));
    }
    count = record.episodes() - first_episode + 1;
  }
  if (first_episode < 1 || first_episode + count - 1 > record.episodes() ||
      first_episode + count - 1 > env.episodes()) {
    throw std::invalid_argument("episode range is outside the record");
  }
  if (ledger.cumulative.empty()) {
    ledger.algorithm = std::string(record.label());
    ledger.seed = record.seed;
  }
  double running = ledger.final_regret();
  for (int k = first_episode; k < first_episode + count; ++k) {
    const double realized = record.episode_costs[k - 1];
    const double optimum = episode_optimal_cost(env, k, record.initial_states[k - 1]);
    running += realized - optimum;
    ledger.episode_costs.push_back(realized);
    ledger.optimal_costs.push_back(optimum);
    ledger.cumulative.push_back(running);
  }
}

RegretLedger make_ledger(const RunRecord& record, const LtvEnvironment& env) {
  RegretLedger ledger;
  accumulate(ledger, record, env);
  return ledger;
}

double total_variation_budget(const LtvEnvironment& env) {
  double total = 0.0;
  for (int k = 1; k <= env.episodes(); ++k) {
    total += episode_variation_budget(env, k);
    if (k < env.episodes()) {
      total += (env.theta(k + 1, 1).matrix() - env.theta(k, env.horizon()).matrix()).norm();
    }
  }
  return total;
}

int optimal_epoch_length(int horizon, int episodes, double total_variation) {
  if (!(total_variation > 0.0)) throw std::invalid_argument("total variation must be > 0");
  if (horizon < 1 || episodes < 1) throw std::invalid_argument("H and K must be >= 1");
  const double steps = static_cast<double>(horizon) * episodes;
  const double raw = std::cbrt(steps * steps / (total_variation * total_variation));
  return static_cast<int>(std::clamp(std::round(raw), 1.0, steps));
}

double growth_exponent(std::span<const double> cumulative) {
  if (cumulative.size() < 10) throw std::invalid_argument("need at least 10 values");
  constexpr double kFloor = 1e-9;
  const std::size_t first = cumulative.size() / 2;
  const bool any_positive = std::any_of(cumulative.begin() + static_cast<std::ptrdiff_t>(first),
                                        cumulative.end(), [](double c) { return c > 0.0; });
  if (!any_positive) throw std::invalid_argument("cumulative sequence has no positive tail");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double count = static_cast<double>(cumulative.size() - first);
  for (std::size_t i = first; i < cumulative.size(); ++i) {
    const double lx = std::log(static_cast<double>(i + 1));
    const double ly = std::log(std::max(cumulative[i], kFloor));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

}  // namespace ltvofu
