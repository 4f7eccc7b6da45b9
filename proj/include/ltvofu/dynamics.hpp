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

#ifndef LTVOFU_DYNAMICS_HPP_
#define LTVOFU_DYNAMICS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ltvofu/rng.hpp"

namespace ltvofu {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Stacked system parameter [A | B]^T, shape (n+m) x n.
///
/// Rows 0..n-1 hold A^T and rows n..n+m-1 hold B^T, so that a regressor row
/// z^T = [x^T u^T] maps to the next state as z^T * matrix.
class Theta {
 public:
  Theta() = default;
  Theta(Index state_dim, Index input_dim);
  explicit Theta(MatrixXd stacked, Index state_dim);

  static Theta from_ab(const MatrixXd& a, const MatrixXd& b);
  static Theta zero(Index state_dim, Index input_dim) { return {state_dim, input_dim}; }

  Index state_dim() const { return state_dim_; }
  Index input_dim() const { return matrix_.rows() - state_dim_; }
  Index regressor_dim() const { return matrix_.rows(); }

  MatrixXd a() const { return matrix_.topRows(state_dim_).transpose(); }
  MatrixXd b() const { return matrix_.bottomRows(input_dim()).transpose(); }

  const MatrixXd& matrix() const { return matrix_; }
  MatrixXd& matrix() { return matrix_; }

  bool same_shape(const Theta& other) const {
    return state_dim_ == other.state_dim_ && matrix_.rows() == other.matrix_.rows();
  }

  friend bool operator==(const Theta& lhs, const Theta& rhs) {
    return lhs.same_shape(rhs) && lhs.matrix_ == rhs.matrix_;
  }

 private:
  MatrixXd matrix_;
  Index state_dim_ = 0;
};

enum class Preset { kSwitching, kSlow, kFrequent, kLti, kCustom };

Preset parse_preset(std::string_view name);
std::string_view preset_name(Preset preset);

/// Law of the episode initial state x_{k,1}.
struct InitialStateLaw {
  enum class Kind { kUniformBall, kPointMass };
  Kind kind = Kind::kUniformBall;
  VectorXd point;  // used by kPointMass

  static InitialStateLaw uniform_ball() { return {}; }
  static InitialStateLaw point_mass(VectorXd x) { return {Kind::kPointMass, std::move(x)}; }
};

/// Schedule of true dynamics over (episode, step) plus cost and noise data.
/// Immutable after construction. Episodes and steps are 1-based.
class LtvEnvironment {
 public:
  // schedule[k-1][h-1] is Theta*_{k,h}.
  LtvEnvironment(std::vector<std::vector<Theta>> schedule, MatrixXd q, MatrixXd r_cost,
                 double noise_scale, InitialStateLaw initial_state_law = {});

  int horizon() const { return horizon_; }
  int episodes() const { return static_cast<int>(schedule_.size()); }
  Index state_dim() const { return state_dim_; }
  Index input_dim() const { return input_dim_; }
  double noise_scale() const { return noise_scale_; }
  const MatrixXd& q() const { return q_; }
  const MatrixXd& r_cost() const { return r_cost_; }
  const InitialStateLaw& initial_state_law() const { return initial_state_law_; }

  const Theta& theta(int k, int h) const;
  const std::vector<Theta>& episode_schedule(int k) const;

  LtvEnvironment with_noise_scale(double noise_scale) const;
  LtvEnvironment with_initial_state_law(InitialStateLaw law) const;
  LtvEnvironment with_costs(MatrixXd q, MatrixXd r_cost) const;

 private:
  std::vector<std::vector<Theta>> schedule_;
  MatrixXd q_;
  MatrixXd r_cost_;
  double noise_scale_;
  InitialStateLaw initial_state_law_;
  int horizon_ = 0;
  Index state_dim_ = 0;
  Index input_dim_ = 0;
};

/// One observed step: regressor z = [x; u], successor state and stage cost.
struct Transition {
  VectorXd z;
  VectorXd x_next;
  double cost = 0.0;
};

/// Piecewise-constant segments for the custom preset. Segment i covers
/// steps [i*segment_length + 1, (i+1)*segment_length]; the last one persists.
struct CustomSchedule {
  std::vector<Theta> segments;
  int segment_length = 1;
};

/// Builds one of the experiment presets. Q = R = I for the built-in presets.
LtvEnvironment build_environment(Preset preset, int horizon, int episodes, double noise_scale,
                                 std::uint64_t seed, const CustomSchedule* custom = nullptr);

double stage_cost(const LtvEnvironment& env, const VectorXd& x, const VectorXd& u);

/// Advances the true system one step and returns the observation.
/// The cost is charged on the current (x, u) before the transition.
Transition step(const LtvEnvironment& env, int k, int h, const VectorXd& x, const VectorXd& u,
                Rng& rng);

VectorXd sample_initial_state(const LtvEnvironment& env, Rng& rng);

/// Sum over h of ||Theta_{k,h+1} - Theta_{k,h}||_F.
double episode_variation_budget(const LtvEnvironment& env, int k);

// Experiment matrices used by the presets.
namespace presets {
MatrixXd a1();
MatrixXd b1();
MatrixXd a2();
MatrixXd b2();
}  // namespace presets

}  // namespace ltvofu

#endif  // LTVOFU_DYNAMICS_HPP_
