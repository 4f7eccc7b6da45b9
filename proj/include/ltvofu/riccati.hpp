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

#ifndef LTVOFU_RICCATI_HPP_
#define LTVOFU_RICCATI_HPP_

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ltvofu/dynamics.hpp"

namespace ltvofu {

/// R + B^T P B failed to factor (not positive definite).
class CandidateIllConditioned : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite-horizon value matrices and gains for steps h0..H.
/// p_seq[i] is P_{h0+i} (p_seq.back() = P_{H+1} = 0); k_seq[i] is K_{h0+i}.
struct RiccatiSolution {
  std::vector<MatrixXd> p_seq;
  std::vector<MatrixXd> k_seq;

  int horizon_span() const { return static_cast<int>(k_seq.size()); }
};

/// Backward recursion from P_{H+1} = 0 through the given per-step models:
///   K_h = -(R + B^T P_{h+1} B)^{-1} B^T P_{h+1} A
///   P_h = Q + A^T P_{h+1} A + A^T P_{h+1} B K_h
RiccatiSolution backward_recursion(std::span<const Theta> thetas, const MatrixXd& q,
                                   const MatrixXd& r_cost);

/// Same model at every step of a span.
RiccatiSolution backward_recursion(const Theta& theta, const MatrixXd& q, const MatrixXd& r_cost,
                                   int horizon_span);

/// x1^T P_{h0} x1 + noise^2 * sum_{h=h0}^{H} tr(P_{h+1}).
double optimal_cost(const RiccatiSolution& sol, const VectorXd& x1, double noise_scale);

VectorXd gain_control(const MatrixXd& gain, const VectorXd& x);

/// Optimal cost and first-step gain of a constant model over a span.
///
/// Equivalent to backward_recursion(theta, q, r, span) followed by
/// optimal_cost, but keeps only the running P and stops iterating once the
/// recursion has reached its fixed point to machine precision; the remaining
/// steps then contribute identical traces. Reuses its workspace between
/// calls, so one instance per thread.
class ConstantModelEvaluator {
 public:
  ConstantModelEvaluator(MatrixXd q, MatrixXd r_cost);

  struct Result {
    double cost = 0.0;
    MatrixXd first_gain;
  };

  /// Throws CandidateIllConditioned.
  double cost(const Theta& theta, int horizon_span, const VectorXd& x, double noise_scale);
  Result evaluate(const Theta& theta, int horizon_span, const VectorXd& x, double noise_scale);

 private:
  // Advances p_ one step backward (old value kept in p_prev_); the gain
  // lands in gain_.
  void backward_step(const MatrixXd& a, const MatrixXd& b);

  MatrixXd q_;
  MatrixXd r_cost_;
  MatrixXd p_, p_prev_, p_next_, a_, b_, pb_, pa_, s_, gain_;
  Eigen::LLT<MatrixXd> llt_;
};

}  // namespace ltvofu

#endif  // LTVOFU_RICCATI_HPP_
