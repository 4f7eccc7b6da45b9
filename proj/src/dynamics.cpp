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

#include "ltvofu/dynamics.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace ltvofu {

namespace {

void require_spd(const MatrixXd& m, const char* name) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw DimensionError(std::string(name) + " must be a non-empty square matrix");
  }
  if ((m - m.transpose()).norm() > 1e-12 * (1.0 + m.norm())) {
    throw std::invalid_argument(std::string(name) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument(std::string(name) + " must be positive definite");
  }
}

MatrixXd mat2(double a, double b, double c, double d) {
  MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

MatrixXd col2(double a, double b) {
  MatrixXd m(2, 1);
  m << a, b;
  return m;
}

}  // namespace

namespace presets {
MatrixXd a1() { return mat2(1.0, 0.5, 0.0, 1.0); }
MatrixXd b1() { return col2(0.0, 1.2); }
MatrixXd a2() { return mat2(1.0, 1.5, 0.0, 1.0); }
MatrixXd b2() { return col2(0.0, 0.9); }
}  // namespace presets

Theta::Theta(Index state_dim, Index input_dim)
    : matrix_(MatrixXd::Zero(state_dim + input_dim, state_dim)), state_dim_(state_dim) {
  if (state_dim < 1 || input_dim < 1) throw DimensionError("Theta needs n >= 1 and m >= 1");
}

Theta::Theta(MatrixXd stacked, Index state_dim) : matrix_(std::move(stacked)), state_dim_(state_dim) {
  if (state_dim < 1 || matrix_.cols() != state_dim || matrix_.rows() <= state_dim) {
    throw DimensionError("stacked Theta must be (n+m) x n with n, m >= 1");
  }
}

Theta Theta::from_ab(const MatrixXd& a, const MatrixXd& b) {
  const Index n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() < 1 || n < 1) {
    throw DimensionError("A must be n x n and B must be n x m");
  }
  MatrixXd stacked(n + b.cols(), n);
  stacked.topRows(n) = a.transpose();
  stacked.bottomRows(b.cols()) = b.transpose();
  return Theta(std::move(stacked), n);
}

Preset parse_preset(std::string_view name) {
  if (name == "switching") return Preset::kSwitching;
  if (name == "slow") return Preset::kSlow;
  if (name == "frequent") return Preset::kFrequent;
  if (name == "lti") return Preset::kLti;
  if (name == "custom") return Preset::kCustom;
  throw std::invalid_argument("unknown environment preset '" + std::string(name) + "'");
}

std::string_view preset_name(Preset preset) {
  switch (preset) {
    case Preset::kSwitching: return "switching";
    case Preset::kSlow: return "slow";
    case Preset::kFrequent: return "frequent";
    case Preset::kLti: return "lti";
    case Preset::kCustom: return "custom";
  }
  return "unknown";
}

LtvEnvironment::LtvEnvironment(std::vector<std::vector<Theta>> schedule, MatrixXd q,
                               MatrixXd r_cost, double noise_scale,
                               InitialStateLaw initial_state_law)
    : schedule_(std::move(schedule)),
      q_(std::move(q)),
      r_cost_(std::move(r_cost)),
      noise_scale_(noise_scale),
      initial_state_law_(std::move(initial_state_law)) {
  if (schedule_.empty() || schedule_.front().size() < 2) {
    throw std::invalid_argument("environment needs K >= 1 episodes and H >= 2 steps");
  }
  horizon_ = static_cast<int>(schedule_.front().size());
  state_dim_ = schedule_.front().front().state_dim();
  input_dim_ = schedule_.front().front().input_dim();
  for (const auto& episode : schedule_) {
    if (static_cast<int>(episode.size()) != horizon_) {
      throw std::invalid_argument("every episode must cover the full horizon");
    }
    for (const Theta& t : episode) {
      if (t.state_dim() != state_dim_ || t.input_dim() != input_dim_) {
        throw DimensionError("schedule mixes system dimensions");
      }
    }
  }
  require_spd(q_, "Q");
  require_spd(r_cost_, "R");
  if (q_.rows() != state_dim_ || r_cost_.rows() != input_dim_) {
    throw DimensionError("cost matrices do not match the system dimensions");
  }
  if (!(noise_scale_ >= 0.0) || !std::isfinite(noise_scale_)) {
    throw std::invalid_argument("noise_scale must be finite and >= 0");
  }
  if (initial_state_law_.kind == InitialStateLaw::Kind::kPointMass &&
      initial_state_law_.point.size() != state_dim_) {
    throw DimensionError("initial point-mass has the wrong dimension");
  }
}

const Theta& LtvEnvironment::theta(int k, int h) const {
  if (k < 1 || k > episodes() || h < 1 || h > horizon_) {
    throw std::out_of_range("(episode, step) = (" + std::to_string(k) + ", " + std::to_string(h) +
                            ") is outside the schedule");
  }
  return schedule_[k - 1][h - 1];
}

const std::vector<Theta>& LtvEnvironment::episode_schedule(int k) const {
  if (k < 1 || k > episodes()) throw std::out_of_range("episode outside the schedule");
  return schedule_[k - 1];
}

LtvEnvironment LtvEnvironment::with_noise_scale(double noise_scale) const {
  return {schedule_, q_, r_cost_, noise_scale, initial_state_law_};
}

LtvEnvironment LtvEnvironment::with_initial_state_law(InitialStateLaw law) const {
  return {schedule_, q_, r_cost_, noise_scale_, std::move(law)};
}

LtvEnvironment LtvEnvironment::with_costs(MatrixXd q, MatrixXd r_cost) const {
  return {schedule_, std::move(q), std::move(r_cost), noise_scale_, initial_state_law_};
}

LtvEnvironment build_environment(Preset preset, int horizon, int episodes, double noise_scale,
                                 std::uint64_t seed, const CustomSchedule* custom) {
  if (horizon < 2) throw std::invalid_argument("horizon H must be >= 2");
  if (episodes < 1) throw std::invalid_argument("episodes K must be >= 1");
  constexpr int kFrequentBlock = 20;
  if (preset == Preset::kFrequent && horizon < kFrequentBlock) {
    throw std::invalid_argument("the frequent preset needs H >= 20");
  }

  const Theta first = Theta::from_ab(presets::a1(), presets::b1());
  const Theta second = Theta::from_ab(presets::a2(), presets::b2());

  std::vector<std::vector<Theta>> schedule(episodes);
  switch (preset) {
    case Preset::kSwitching:
      for (auto& ep : schedule) {
        ep.reserve(horizon);
        for (int h = 1; h <= horizon; ++h) ep.push_back(h <= horizon / 2 ? first : second);
      }
      break;
    case Preset::kSlow:
      for (auto& ep : schedule) {
        ep.reserve(horizon);
        for (int h = 1; h <= horizon; ++h) {
          ep.push_back(Theta::from_ab(mat2(1.0, 1.0, 0.0, 1.0), col2(0.0, h / 20.0)));
        }
      }
      break;
    case Preset::kFrequent: {
      const std::vector<Theta> configs = {first, second,
                                          Theta::from_ab(presets::a1(), -presets::b1()),
                                          Theta::from_ab(presets::a2(), -presets::b2())};
      for (int k = 1; k <= episodes; ++k) {
        Rng rng = Rng::derive(seed, StreamTag::kSchedule, {static_cast<std::uint64_t>(k)});
        auto& ep = schedule[k - 1];
        ep.reserve(horizon);
        std::size_t pick = 0;
        for (int h = 1; h <= horizon; ++h) {
          if ((h - 1) % kFrequentBlock == 0) pick = rng.index(configs.size());
          ep.push_back(configs[pick]);
        }
      }
      break;
    }
    case Preset::kLti:
      for (auto& ep : schedule) ep.assign(horizon, first);
      break;
    case Preset::kCustom: {
      if (custom == nullptr || custom->segments.empty() || custom->segment_length < 1) {
        throw std::invalid_argument("the custom preset needs at least one segment");
      }
      for (auto& ep : schedule) {
        ep.reserve(horizon);
        for (int h = 1; h <= horizon; ++h) {
          const auto seg = std::min<std::size_t>((h - 1) / custom->segment_length,
                                                 custom->segments.size() - 1);
          ep.push_back(custom->segments[seg]);
        }
      }
      const Index n = custom->segments.front().state_dim();
      const Index m = custom->segments.front().input_dim();
      return {std::move(schedule), MatrixXd::Identity(n, n), MatrixXd::Identity(m, m),
              noise_scale};
    }
  }
  return {std::move(schedule), MatrixXd::Identity(2, 2), MatrixXd::Identity(1, 1), noise_scale};
}

double stage_cost(const LtvEnvironment& env, const VectorXd& x, const VectorXd& u) {
  return x.dot(env.q() * x) + u.dot(env.r_cost() * u);
}

Transition step(const LtvEnvironment& env, int k, int h, const VectorXd& x, const VectorXd& u,
                Rng& rng) {
  if (x.size() != env.state_dim() || u.size() != env.input_dim()) {
    throw DimensionError("state or input dimension does not match the environment");
  }
  const MatrixXd& stacked = env.theta(k, h).matrix();
  const Index n = env.state_dim();
  Transition t;
  t.z.resize(n + env.input_dim());
  t.z << x, u;
  t.x_next = stacked.transpose() * t.z;
  if (env.noise_scale() > 0.0) {
    for (Index i = 0; i < n; ++i) t.x_next(i) += rng.normal(env.noise_scale());
  }
  t.cost = stage_cost(env, x, u);
  return t;
}

VectorXd sample_initial_state(const LtvEnvironment& env, Rng& rng) {
  const auto& law = env.initial_state_law();
  if (law.kind == InitialStateLaw::Kind::kPointMass) return law.point;
  VectorXd direction = rng.normal_vector(env.state_dim());
  double norm = direction.norm();
  while (norm == 0.0) {
    direction = rng.normal_vector(env.state_dim());
    norm = direction.norm();
  }
  return direction * (rng.uniform(0.0, 1.0) / norm);
}

double episode_variation_budget(const LtvEnvironment& env, int k) {
  const auto& ep = env.episode_schedule(k);
  double total = 0.0;
  for (std::size_t h = 0; h + 1 < ep.size(); ++h) {
    total += (ep[h + 1].matrix() - ep[h].matrix()).norm();
  }
  return total;
}

}  // namespace ltvofu
