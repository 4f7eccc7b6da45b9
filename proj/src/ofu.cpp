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

#include "ltvofu/ofu.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ltvofu {

void OfuConfig::validate() const {
  auto fail = [](const char* key, const std::string& why) {
    throw std::invalid_argument(std::string(key) + ": " + why);
  };
  if (num_candidates < 1) fail("candidates", "must be >= 1");
  if (!(perturb_scale >= 0.0) || !std::isfinite(perturb_scale)) fail("perturb", "must be >= 0");
  if (epoch_length < 1) fail("epoch", "must be >= 1");
  if (window < 1) fail("window", "must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail("lambda", "must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta", "must lie in (0, 1)");
}

std::string_view algorithm_label(Algorithm algo) {
  switch (algo) {
    case Algorithm::kROfu: return "r-ofu";
    case Algorithm::kSwOfu: return "sw-ofu";
    case Algorithm::kOracleLqr: return "oracle-lqr";
    case Algorithm::kZero: return "zero";
    case Algorithm::kOmniscient: return "omniscient";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view label) {
  for (Algorithm a : {Algorithm::kROfu, Algorithm::kSwOfu, Algorithm::kOracleLqr, Algorithm::kZero,
                      Algorithm::kOmniscient}) {
    if (algorithm_label(a) == label) return a;
  }
  return std::nullopt;
}

std::vector<Theta> generate_candidates(const ConfidenceEllipsoid& ell, const OfuConfig& cfg,
                                       Rng& rng) {
  std::vector<Theta> out;
  out.reserve(static_cast<std::size_t>(cfg.num_candidates));
  out.push_back(ell.center);
  for (int i = 1; i < cfg.num_candidates; ++i) {
    if (cfg.perturb_scale == 0.0) {
      out.push_back(ell.center);
      continue;
    }
    Theta candidate = ell.center;
    MatrixXd& mat = candidate.matrix();
    for (Index c = 0; c < mat.cols(); ++c) {
      for (Index r = 0; r < mat.rows(); ++r) {
        mat(r, c) += rng.uniform(-cfg.perturb_scale, cfg.perturb_scale);
      }
    }
    out.push_back(project(ell, candidate));
  }
  return out;
}

OptimisticChoice select_optimistic(std::span<const Theta> candidates,
                                   ConstantModelEvaluator& evaluator, int horizon_span,
                                   const VectorXd& x_eval, double noise_scale) {
  if (candidates.empty()) throw std::invalid_argument("candidate list is empty");
  OptimisticChoice best;
  best.cost = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double cost = 0.0;
    try {
      cost = evaluator.cost(candidates[i], horizon_span, x_eval, noise_scale);
    } catch (const CandidateIllConditioned&) {
      continue;
    }
    if (!std::isfinite(cost)) continue;
    if (!found || cost < best.cost) {
      found = true;
      best.cost = cost;
      best.index = i;
    }
  }
  if (!found) {
    best.theta = candidates.front();
    best.index = 0;
    best.fallback = true;
    best.gain = MatrixXd::Zero(candidates.front().input_dim(), candidates.front().state_dim());
    return best;
  }
  best.theta = candidates[best.index];
  best.gain = evaluator.evaluate(best.theta, horizon_span, x_eval, noise_scale).first_gain;
  return best;
}

OptimisticChoice select_optimistic(std::span<const Theta> candidates, const MatrixXd& q,
                                   const MatrixXd& r_cost, int horizon_span,
                                   const VectorXd& x_eval, double noise_scale) {
  ConstantModelEvaluator evaluator(q, r_cost);
  return select_optimistic(candidates, evaluator, horizon_span, x_eval, noise_scale);
}

namespace {

struct EpisodeStreams {
  Rng init;
  Rng noise;
};

EpisodeStreams episode_streams(std::uint64_t seed, int k) {
  const auto ep = static_cast<std::uint64_t>(k);
  return {Rng::derive(seed, StreamTag::kInitialState, {ep}),
          Rng::derive(seed, StreamTag::kProcessNoise, {ep})};
}

RunRecord start_record(const LtvEnvironment& env, Algorithm algo, std::uint64_t seed) {
  RunRecord record;
  record.algorithm = algo;
  record.seed = seed;
  record.horizon = env.horizon();
  record.steps.reserve(static_cast<std::size_t>(env.episodes()) * env.horizon());
  record.initial_states.reserve(env.episodes());
  record.episode_costs.reserve(env.episodes());
  return record;
}

RunRecord run_ofu(const LtvEnvironment& env, const OfuConfig& cfg, std::uint64_t seed,
                  GramMode mode) {
  cfg.validate();
  const bool restart = mode == GramMode::kRestart;
  RunRecord record = start_record(env, restart ? Algorithm::kROfu : Algorithm::kSwOfu, seed);
  ConstantModelEvaluator evaluator(env.q(), env.r_cost());
  Rng candidate_rng = Rng::derive(seed, StreamTag::kCandidates);
  const int horizon = env.horizon();

  for (int k = 1; k <= env.episodes(); ++k) {
    auto [init_rng, noise_rng] = episode_streams(seed, k);
    VectorXd x = sample_initial_state(env, init_rng);
    const VectorXd x1 = x;
    record.initial_states.push_back(x1);

    RadiusParams radius_params;
    radius_params.delta = cfg.delta;
    radius_params.noise_scale = env.noise_scale();
    radius_params.variation_budget = episode_variation_budget(env, k);
    radius_params.span = restart ? cfg.epoch_length : cfg.window;
    radius_params.horizon = horizon;

    GramState gram = restart
                         ? GramState::restarting(env.state_dim(), env.input_dim(), cfg.lambda)
                         : GramState::sliding(env.state_dim(), env.input_dim(), cfg.lambda,
                                              cfg.window);
    double episode_cost = 0.0;
    for (int h = 1; h <= horizon; ++h) {
      if (restart && (h - 1) % cfg.epoch_length == 0) {
        gram.reset();
        ++record.resets;
      }
      const double zeta = confidence_radius(gram, radius_params);
      const ConfidenceEllipsoid ell = make_ellipsoid(gram, zeta);
      const std::vector<Theta> candidates = generate_candidates(ell, cfg, candidate_rng);

      const int remaining = horizon - h + 1;
      const VectorXd& x_eval = cfg.evaluate_at_current_state ? x : x1;
      const OptimisticChoice choice =
          select_optimistic(candidates, evaluator, remaining, x_eval, env.noise_scale());
      const VectorXd u = gain_control(choice.gain, x);
      Transition t = step(env, k, h, x, u, noise_rng);

      StepLog log;
      log.episode = k;
      log.step = h;
      log.x = x;
      log.u = u;
      log.cost = t.cost;
      log.candidate_index = static_cast<int>(choice.index);
      log.zeta = zeta;
      log.logdet_v = gram.log_det();
      log.truth_distance = ell.distance(env.theta(k, h));
      log.selected_distance = ell.distance(choice.theta);
      log.selected_cost = choice.cost;
      log.center_cost = choice.index == 0 ? choice.cost
                                          : evaluator.cost(candidates.front(), remaining, x_eval,
                                                           env.noise_scale());
      log.fallback = choice.fallback;
      record.steps.push_back(std::move(log));

      episode_cost += t.cost;
      x = t.x_next;
      gram.update(t);
    }
    record.episode_costs.push_back(episode_cost);
  }
  return record;
}

}  // namespace

RunRecord run_r_ofu(const LtvEnvironment& env, const OfuConfig& cfg, std::uint64_t seed) {
  return run_ofu(env, cfg, seed, GramMode::kRestart);
}

RunRecord run_sw_ofu(const LtvEnvironment& env, const OfuConfig& cfg, std::uint64_t seed) {
  return run_ofu(env, cfg, seed, GramMode::kSliding);
}

RunRecord run_baseline(const LtvEnvironment& env, Algorithm which, std::uint64_t seed) {
  if (which == Algorithm::kROfu || which == Algorithm::kSwOfu) {
    throw std::invalid_argument("run_baseline expects oracle-lqr, zero or omniscient");
  }
  RunRecord record = start_record(env, which, seed);
  const int horizon = env.horizon();
  const MatrixXd zero_gain = MatrixXd::Zero(env.input_dim(), env.state_dim());

  for (int k = 1; k <= env.episodes(); ++k) {
    auto [init_rng, noise_rng] = episode_streams(seed, k);
    VectorXd x = sample_initial_state(env, init_rng);
    record.initial_states.push_back(x);

    RiccatiSolution sol;
    if (which == Algorithm::kOmniscient) {
      sol = backward_recursion(env.episode_schedule(k), env.q(), env.r_cost());
    } else if (which == Algorithm::kOracleLqr) {
      // Nominal model frozen at the episode's first step.
      sol = backward_recursion(env.theta(k, 1), env.q(), env.r_cost(), horizon);
    }

    double episode_cost = 0.0;
    for (int h = 1; h <= horizon; ++h) {
      const MatrixXd& gain = which == Algorithm::kOmniscient  ? sol.k_seq[h - 1]
                             : which == Algorithm::kOracleLqr ? sol.k_seq.front()
                                                              : zero_gain;
      const VectorXd u = gain_control(gain, x);
      Transition t = step(env, k, h, x, u, noise_rng);
      StepLog log;
      log.episode = k;
      log.step = h;
      log.x = x;
      log.u = u;
      log.cost = t.cost;
      record.steps.push_back(std::move(log));
      episode_cost += t.cost;
      x = t.x_next;
    }
    record.episode_costs.push_back(episode_cost);
  }
  return record;
}

RunRecord run_algorithm(const LtvEnvironment& env, Algorithm algo, const OfuConfig& cfg,
                        std::uint64_t seed) {
  switch (algo) {
    case Algorithm::kROfu: return run_r_ofu(env, cfg, seed);
    case Algorithm::kSwOfu: return run_sw_ofu(env, cfg, seed);
    default: return run_baseline(env, algo, seed);
  }
}

}  // namespace ltvofu
