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

#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

namespace ltvofu {
namespace {

LtvEnvironment scalar_env(double a, double b, int horizon, int episodes, double noise) {
  std::vector<std::vector<Theta>> schedule(
      episodes, std::vector<Theta>(horizon, Theta::from_ab(MatrixXd::Constant(1, 1, a),
                                                           MatrixXd::Constant(1, 1, b))));
  return LtvEnvironment(std::move(schedule), MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1),
                        noise);
}

// A record with given per-episode costs and zero initial states.
RunRecord synthetic_record(const std::vector<double>& costs, Index n) {
  RunRecord rec;
  rec.algorithm = Algorithm::kZero;
  rec.episode_costs = costs;
  rec.initial_states.assign(costs.size(), VectorXd::Zero(n));
  return rec;
}

TEST(EpisodeOptimalCostTest, ZeroStateWithoutNoiseCostsNothing) {
  const auto env = build_environment(Preset::kLti, 30, 1, 0.0, 0);
  EXPECT_EQ(episode_optimal_cost(env, 1, VectorXd::Zero(2)), 0.0);
}

TEST(EpisodeOptimalCostTest, ScalarIntegratorApproachesTheGoldenRatio) {
  const auto env = scalar_env(1.0, 1.0, 60, 1, 0.0);
  EXPECT_NEAR(episode_optimal_cost(env, 1, VectorXd::Ones(1)), (1.0 + std::sqrt(5.0)) / 2.0, 1e-9);
  EXPECT_NEAR(episode_optimal_cost(env, 1, VectorXd::Constant(1, 2.0)),
              4.0 * (1.0 + std::sqrt(5.0)) / 2.0, 1e-8);
}

TEST(EpisodeOptimalCostTest, NoiseAddsTheSummedTraces) {
  const auto quiet = build_environment(Preset::kSwitching, 40, 1, 0.0, 0);
  const auto noisy = quiet.with_noise_scale(0.1);
  const VectorXd x = VectorXd::Unit(2, 0);
  std::vector<Theta> models;
  for (int h = 1; h <= 40; ++h) models.push_back(quiet.theta(1, h));
  const auto sol = backward_recursion(models, quiet.q(), quiet.r_cost());
  double trace_sum = 0.0;
  for (int h = 2; h <= 40; ++h) trace_sum += sol.p_seq[h - 1].trace();
  EXPECT_NEAR(episode_optimal_cost(noisy, 1, x) - episode_optimal_cost(quiet, 1, x),
              0.01 * trace_sum, 1e-10 * trace_sum);
}

TEST(EpisodeOptimalCostTest, RejectsBadArguments) {
  const auto env = build_environment(Preset::kLti, 10, 2, 0.1, 0);
  EXPECT_THROW(episode_optimal_cost(env, 3, VectorXd::Zero(2)), std::out_of_range);
  EXPECT_THROW(episode_optimal_cost(env, 0, VectorXd::Zero(2)), std::out_of_range);
  EXPECT_THROW(episode_optimal_cost(env, 1, VectorXd::Zero(3)), DimensionError);
}

TEST(AccumulateTest, CumulativeIsAPrefixSum) {
  const auto env = build_environment(Preset::kLti, 10, 4, 0.0, 0);
  const auto rec = synthetic_record({1.0, 2.5, 0.5, 4.0}, 2);
  const auto ledger = make_ledger(rec, env);
  ASSERT_EQ(ledger.size(), 4u);
  const std::vector<double> expected = {1.0, 3.5, 4.0, 8.0};  // optimum is 0 from x = 0
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(ledger.optimal_costs[i], 0.0);
    EXPECT_DOUBLE_EQ(ledger.cumulative[i], expected[i]);
  }
  EXPECT_DOUBLE_EQ(ledger.final_regret(), 8.0);
}

TEST(AccumulateTest, SplittingTheRunIsAdditive) {
  const auto env = build_environment(Preset::kSwitching, 30, 6, 0.1, 2);
  OfuConfig cfg;
  cfg.num_candidates = 5;
  const auto rec = run_r_ofu(env, cfg, 2);
  const auto whole = make_ledger(rec, env);
  RegretLedger split;
  accumulate(split, rec, env, 1, 2);
  const double first = split.final_regret();
  accumulate(split, rec, env, 3, 4);
  ASSERT_EQ(split.size(), 6u);
  EXPECT_NEAR(split.final_regret(), whole.final_regret(), 1e-9 * std::abs(whole.final_regret()));
  EXPECT_NEAR(split.final_regret() - first, whole.cumulative[5] - whole.cumulative[1],
              1e-9 * std::abs(whole.final_regret()));
}

TEST(AccumulateTest, ConstantGapGrowsLinearly) {
  const auto env = build_environment(Preset::kLti, 10, 25, 0.0, 0);
  const auto ledger = make_ledger(synthetic_record(std::vector<double>(25, 0.3), 2), env);
  for (std::size_t i = 0; i < 25; ++i) EXPECT_NEAR(ledger.cumulative[i], 0.3 * (i + 1), 1e-12);
}

TEST(AccumulateTest, EpisodeCountMismatchIsAnError) {
  const auto env = build_environment(Preset::kLti, 10, 4, 0.0, 0);
  const auto rec = synthetic_record({1.0, 2.0, 3.0}, 2);
  EXPECT_THROW(make_ledger(rec, env), std::invalid_argument);
  RegretLedger ledger;
  EXPECT_THROW(accumulate(ledger, rec, env, 3, 2), std::invalid_argument);
}

TEST(RegretTest, OmniscientRegretIsZeroMeanUnderNoise) {
  const auto env = build_environment(Preset::kSwitching, 50, 1, 0.1, 0);
  std::vector<double> regrets;
  for (int s = 0; s < 200; ++s) {
    regrets.push_back(make_ledger(run_baseline(env, Algorithm::kOmniscient, s), env).final_regret());
  }
  const double mean = std::accumulate(regrets.begin(), regrets.end(), 0.0) / regrets.size();
  double var = 0.0;
  for (double r : regrets) var += (r - mean) * (r - mean);
  const double se = std::sqrt(var / (regrets.size() - 1) / regrets.size());
  EXPECT_LE(std::abs(mean), 2.0 * se) << "mean " << mean << " se " << se;
}

TEST(RegretTest, OmniscientRegretVanishesWithoutNoise) {
  for (Preset p : {Preset::kSwitching, Preset::kSlow, Preset::kFrequent}) {
    const auto env = build_environment(p, 50, 3, 0.0, 1);
    const auto ledger = make_ledger(run_baseline(env, Algorithm::kOmniscient, 1), env);
    for (std::size_t i = 0; i < ledger.size(); ++i) {
      EXPECT_LE(std::abs(ledger.regret(i)), 1e-10 * (1.0 + ledger.optimal_costs[i]));
    }
  }
}

TEST(RegretTest, ScalingBothCostsScalesTheRegret) {
  const auto env = build_environment(Preset::kSwitching, 40, 3, 0.1, 0);
  const auto scaled = env.with_costs(3.0 * env.q(), 3.0 * env.r_cost());
  // The oracle gain is invariant to the joint scale, so the trajectories match.
  const auto base = make_ledger(run_baseline(env, Algorithm::kOracleLqr, 5), env);
  const auto big = make_ledger(run_baseline(scaled, Algorithm::kOracleLqr, 5), scaled);
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_NEAR(big.cumulative[i], 3.0 * base.cumulative[i], 1e-8 * std::abs(big.cumulative[i]));
  }
}

TEST(VariationBudgetTest, SumsEpisodesAndSeams) {
  EXPECT_EQ(total_variation_budget(build_environment(Preset::kLti, 20, 5, 0.1, 0)), 0.0);
  const auto sw = build_environment(Preset::kSwitching, 20, 5, 0.1, 0);
  // one switch inside each episode and one switch back at each seam
  EXPECT_NEAR(total_variation_budget(sw), 9.0 * episode_variation_budget(sw, 1), 1e-12);
}

TEST(EpochLengthTest, Examples) {
  EXPECT_EQ(optimal_epoch_length(100, 100, 10.0), 100);
  EXPECT_EQ(optimal_epoch_length(100, 100, 10000.0), 1);
  EXPECT_EQ(optimal_epoch_length(100, 100, 1e9), 1);
  EXPECT_EQ(optimal_epoch_length(10, 10, 1e-9), 100);
  // doubling the budget shrinks the epoch by 2^{-2/3}
  EXPECT_EQ(optimal_epoch_length(1000, 1000, 1000.0), 100);
  EXPECT_EQ(optimal_epoch_length(1000, 1000, 2000.0),
            static_cast<int>(std::lround(100.0 * std::pow(2.0, -2.0 / 3.0))));
  int prev = optimal_epoch_length(200, 200, 1.0);
  for (double b = 2.0; b < 1e5; b *= 1.7) {
    const int l = optimal_epoch_length(200, 200, b);
    EXPECT_LE(l, prev);
    prev = l;
  }
  EXPECT_THROW(optimal_epoch_length(100, 100, 0.0), std::invalid_argument);
  EXPECT_THROW(optimal_epoch_length(0, 100, 1.0), std::invalid_argument);
}

std::vector<double> power_curve(double p, int n) {
  std::vector<double> c;
  for (int k = 1; k <= n; ++k) c.push_back(std::pow(k, p));
  return c;
}

TEST(GrowthExponentTest, RecoversPowerLaws) {
  EXPECT_NEAR(growth_exponent(power_curve(1.0, 100)), 1.0, 1e-10);
  EXPECT_NEAR(growth_exponent(power_curve(2.0 / 3.0, 100)), 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(growth_exponent(power_curve(0.5, 100)), 0.5, 1e-10);
  std::vector<double> noisy = power_curve(0.5, 400);
  Rng rng(0);
  for (double& c : noisy) c *= 1.0 + rng.uniform(-0.01, 0.01);
  EXPECT_NEAR(growth_exponent(noisy), 0.5, 0.01);
}

TEST(GrowthExponentTest, RejectsDegenerateCurves) {
  EXPECT_THROW(growth_exponent(power_curve(1.0, 9)), std::invalid_argument);
  EXPECT_THROW(growth_exponent(std::vector<double>(50, -1.0)), std::invalid_argument);
}

}  // namespace
}  // namespace ltvofu
