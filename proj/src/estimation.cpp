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

#include "ltvofu/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ltvofu {

GramState::GramState(Index state_dim, Index input_dim, double lambda, GramMode mode, int window)
    : lambda_(lambda), mode_(mode), window_(window), state_dim_(state_dim) {
  if (state_dim < 1 || input_dim < 1) throw DimensionError("GramState needs n >= 1 and m >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and > 0");
  }
  if (mode == GramMode::kSliding && window < 1) {
    throw std::invalid_argument("sliding window must be >= 1");
  }
  const Index d = state_dim + input_dim;
  v_ = lambda * MatrixXd::Identity(d, d);
  u_ = MatrixXd::Zero(d, state_dim);
}

void GramState::update(const Transition& t) {
  if (t.z.size() != v_.rows() || t.x_next.size() != state_dim_) {
    throw DimensionError("transition does not match the estimator dimensions");
  }
  v_.noalias() += t.z * t.z.transpose();
  u_.noalias() += t.z * t.x_next.transpose();
  ++count_;
  if (mode_ != GramMode::kSliding) return;

  queue_.push_back(t);
  if (static_cast<int>(queue_.size()) > window_) {
    const Transition& old = queue_.front();
    v_.noalias() -= old.z * old.z.transpose();
    u_.noalias() -= old.z * old.x_next.transpose();
    queue_.pop_front();
    --count_;
  }
}

void GramState::reset() {
  if (mode_ != GramMode::kRestart) throw std::logic_error("reset() is only defined in restart mode");
  v_ = lambda_ * MatrixXd::Identity(v_.rows(), v_.cols());
  u_.setZero();
  count_ = 0;
  queue_.clear();
}

Theta GramState::point_estimate() const {
  Eigen::LLT<MatrixXd> llt(v_);
  if (llt.info() != Eigen::Success) {
    throw FactorizationError("Gram matrix is not numerically positive definite");
  }
  return Theta(llt.solve(u_), state_dim_);
}

double GramState::log_det() const {
  Eigen::LLT<MatrixXd> llt(v_);
  if (llt.info() != Eigen::Success) {
    throw FactorizationError("Gram matrix is not numerically positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double GramState::log_det_ratio() const {
  return log_det() - static_cast<double>(v_.rows()) * std::log(lambda_);
}

double confidence_radius(const GramState& state, const RadiusParams& params) {
  if (!(params.delta > 0.0 && params.delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (params.span < 1) throw std::invalid_argument("span must be >= 1");
  const bool sliding = state.mode() == GramMode::kSliding;
  if (sliding && params.horizon < 1) throw std::invalid_argument("horizon must be >= 1");

  const double n = static_cast<double>(state.state_dim());
  const double d = static_cast<double>(state.v().rows());
  const double confidence = sliding ? 2.0 * params.horizon / params.delta : 2.0 / params.delta;
  const double log_term = 2.0 * std::log(confidence) + n * state.log_det_ratio();
  return std::sqrt(state.lambda()) + params.noise_scale * std::sqrt(log_term) +
         std::sqrt(params.span * d) / std::sqrt(state.lambda()) * params.variation_budget;
}

double ConfidenceEllipsoid::distance(const Theta& theta) const {
  if (!theta.same_shape(center)) throw DimensionError("Theta shape does not match the ellipsoid");
  const MatrixXd dev = theta.matrix() - center.matrix();
  // tr(D^T V D) = sum of elementwise (V D) .* D
  return std::sqrt(std::max(0.0, (shaping * dev).cwiseProduct(dev).sum()));
}

bool membership(const ConfidenceEllipsoid& ell, const Theta& theta) {
  return ell.distance(theta) <= ell.radius;
}

Theta project(const ConfidenceEllipsoid& ell, const Theta& theta) {
  const double dist = ell.distance(theta);
  if (dist <= ell.radius) return theta;
  const MatrixXd dev = theta.matrix() - ell.center.matrix();
  double scale = ell.radius / dist;
  Theta out = ell.center;
  out.matrix() += scale * dev;
  // Rounding can leave the scaled point a few ulps outside.
  while (ell.distance(out) > ell.radius) {
    scale *= 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
    out.matrix() = ell.center.matrix() + scale * dev;
  }
  return out;
}

ConfidenceEllipsoid make_ellipsoid(const GramState& state, double radius) {
  return {state.point_estimate(), state.v(), radius};
}

}  // namespace ltvofu
