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

#ifndef LTVOFU_ESTIMATION_HPP_
#define LTVOFU_ESTIMATION_HPP_

#include <deque>
#include <stdexcept>

#include <Eigen/Dense>

#include "ltvofu/dynamics.hpp"

namespace ltvofu {

class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GramMode { kRestart, kSliding };

/// Sufficient statistics of the ridge estimators:
///   V = lambda*I + sum z z^T,   U = sum z x_next^T.
/// In sliding mode only the most recent `window` transitions contribute.
class GramState {
 public:
  GramState(Index state_dim, Index input_dim, double lambda, GramMode mode, int window = 0);

  static GramState restarting(Index state_dim, Index input_dim, double lambda) {
    return {state_dim, input_dim, lambda, GramMode::kRestart};
  }
  static GramState sliding(Index state_dim, Index input_dim, double lambda, int window) {
    return {state_dim, input_dim, lambda, GramMode::kSliding, window};
  }

  void update(const Transition& t);
  /// Restart mode only.
  void reset();

  Theta point_estimate() const;
  /// ln det V - (n+m) ln lambda, from the Cholesky diagonal.
  double log_det_ratio() const;
  double log_det() const;

  const MatrixXd& v() const { return v_; }
  const MatrixXd& u() const { return u_; }
  double lambda() const { return lambda_; }
  GramMode mode() const { return mode_; }
  int window() const { return window_; }
  int count() const { return count_; }
  Index state_dim() const { return state_dim_; }
  Index input_dim() const { return u_.rows() - state_dim_; }
  const std::deque<Transition>& retained() const { return queue_; }

 private:
  MatrixXd v_;
  MatrixXd u_;
  double lambda_;
  GramMode mode_;
  int window_;
  int count_ = 0;
  Index state_dim_;
  std::deque<Transition> queue_;
};

/// Parameters of the confidence radius; `span` is L (restart) or W (sliding).
struct RadiusParams {
  double delta = 0.1;
  double noise_scale = 0.1;
  double variation_budget = 0.0;
  int span = 1;
  int horizon = 1;  // enters ln(2H/delta) in sliding mode
};

/// sqrt(lambda) + noise * sqrt(2 ln(c/delta) + n ln(det V / det lambda I))
///   + sqrt(span (n+m)) / sqrt(lambda) * variation_budget,
/// with c = 2 for restart mode and c = 2H for sliding mode.
double confidence_radius(const GramState& state, const RadiusParams& params);

/// { Theta : ||Theta - center||_shaping <= radius }, ||X||_Y^2 = tr(X^T Y X).
struct ConfidenceEllipsoid {
  Theta center;
  MatrixXd shaping;
  double radius = 0.0;

  double distance(const Theta& theta) const;
};

bool membership(const ConfidenceEllipsoid& ell, const Theta& theta);
Theta project(const ConfidenceEllipsoid& ell, const Theta& theta);

/// Ellipsoid centred on the state's point estimate, shaped by its V.
ConfidenceEllipsoid make_ellipsoid(const GramState& state, double radius);

}  // namespace ltvofu

#endif  // LTVOFU_ESTIMATION_HPP_
