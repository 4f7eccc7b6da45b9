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

#include "ltvofu/riccati.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace ltvofu {

namespace {

void check_costs(const MatrixXd& q, const MatrixXd& r_cost, Index n, Index m) {
  if (q.rows() != n || q.cols() != n || r_cost.rows() != m || r_cost.cols() != m) {
    throw DimensionError("Q must be n x n and R must be m x m");
  }
}

// One backward step from p_next = P_{h+1}; returns (P_h, K_h).
std::pair<MatrixXd, MatrixXd> riccati_step(const MatrixXd& p_next, const MatrixXd& a,
                                           const MatrixXd& b, const MatrixXd& q,
                                           const MatrixXd& r_cost) {
  const MatrixXd pb = p_next * b;
  const MatrixXd pa = p_next * a;
  const MatrixXd s = r_cost + b.transpose() * pb;
  Eigen::LLT<MatrixXd> llt(s);
  if (!s.allFinite() || llt.info() != Eigen::Success) {
    throw CandidateIllConditioned("R + B^T P B is not positive definite");
  }
  MatrixXd gain = -llt.solve(b.transpose() * pa);
  MatrixXd p = q + a.transpose() * (pa + pb * gain);
  p = 0.5 * (p + p.transpose()).eval();
  return {std::move(p), std::move(gain)};
}

}  // namespace

RiccatiSolution backward_recursion(std::span<const Theta> thetas, const MatrixXd& q,
                                   const MatrixXd& r_cost) {
  if (thetas.empty()) throw std::invalid_argument("horizon span must be >= 1");
  const Index n = thetas.front().state_dim();
  const Index m = thetas.front().input_dim();
  check_costs(q, r_cost, n, m);

  const std::size_t span = thetas.size();
  RiccatiSolution sol;
  sol.p_seq.resize(span + 1);
  sol.k_seq.resize(span);
  sol.p_seq[span] = MatrixXd::Zero(n, n);
  for (std::size_t i = span; i-- > 0;) {
    const Theta& theta = thetas[i];
    if (theta.state_dim() != n || theta.input_dim() != m) {
      throw DimensionError("models in a recursion must share dimensions");
    }
    auto [p, gain] = riccati_step(sol.p_seq[i + 1], theta.a(), theta.b(), q, r_cost);
    sol.p_seq[i] = std::move(p);
    sol.k_seq[i] = std::move(gain);
  }
  return sol;
}

RiccatiSolution backward_recursion(const Theta& theta, const MatrixXd& q, const MatrixXd& r_cost,
                                   int horizon_span) {
  if (horizon_span < 1) throw std::invalid_argument("horizon span must be >= 1");
  const std::vector<Theta> thetas(static_cast<std::size_t>(horizon_span), theta);
  return backward_recursion(thetas, q, r_cost);
}

double optimal_cost(const RiccatiSolution& sol, const VectorXd& x1, double noise_scale) {
  if (sol.p_seq.empty()) throw std::invalid_argument("empty Riccati solution");
  const MatrixXd& p0 = sol.p_seq.front();
  if (x1.size() != p0.rows()) throw DimensionError("initial state has the wrong dimension");
  double trace_sum = 0.0;
  for (std::size_t i = 1; i < sol.p_seq.size(); ++i) trace_sum += sol.p_seq[i].trace();
  return x1.dot(p0 * x1) + noise_scale * noise_scale * trace_sum;
}

VectorXd gain_control(const MatrixXd& gain, const VectorXd& x) {
  if (gain.cols() != x.size()) throw DimensionError("gain and state dimensions differ");
  return gain * x;
}

ConstantModelEvaluator::ConstantModelEvaluator(MatrixXd q, MatrixXd r_cost)
    : q_(std::move(q)), r_cost_(std::move(r_cost)) {
  const Index n = q_.rows();
  const Index m = r_cost_.rows();
  p_.resize(n, n);
  p_prev_.resize(n, n);
  p_next_.resize(n, n);
  a_.resize(n, n);
  b_.resize(n, m);
  pb_.resize(n, m);
  pa_.resize(n, n);
  s_.resize(m, m);
  gain_.resize(m, n);
  llt_ = Eigen::LLT<MatrixXd>(m);
}

void ConstantModelEvaluator::backward_step(const MatrixXd& a, const MatrixXd& b) {
  pb_.noalias() = p_ * b;
  pa_.noalias() = p_ * a;
  s_ = r_cost_;
  s_.noalias() += b.transpose() * pb_;
  llt_.compute(s_);
  if (!s_.allFinite() || llt_.info() != Eigen::Success) {
    throw CandidateIllConditioned("R + B^T P B is not positive definite");
  }
  gain_.noalias() = b.transpose() * pa_;
  llt_.solveInPlace(gain_);
  gain_ = -gain_;
  pa_.noalias() += pb_ * gain_;  // P A + P B K
  p_next_ = q_;
  p_next_.noalias() += a.transpose() * pa_;
  p_prev_.swap(p_);
  p_ = 0.5 * (p_next_ + p_next_.transpose());
}

double ConstantModelEvaluator::cost(const Theta& theta, int horizon_span, const VectorXd& x,
                                    double noise_scale) {
  if (horizon_span < 1) throw std::invalid_argument("horizon span must be >= 1");
  const Index n = q_.rows();
  if (theta.state_dim() != n || theta.input_dim() != r_cost_.rows() || x.size() != n) {
    throw DimensionError("model, state and cost dimensions differ");
  }
  a_ = theta.matrix().topRows(n).transpose();
  b_ = theta.matrix().bottomRows(theta.input_dim()).transpose();

  // Iterates P^(0) = 0, P^(j+1) = Riccati(P^(j)); P^(j) is the value matrix
  // j steps before the end, so the span's noise term is sum_{j<span} tr P^(j).
  p_.setZero();
  gain_.setZero();
  double trace_sum = 0.0;
  constexpr double kTol = 4.0 * std::numeric_limits<double>::epsilon();
  for (int j = 0; j < horizon_span; ++j) {
    trace_sum += p_.trace();
    if (j + 1 == horizon_span) {
      backward_step(a_, b_);
      break;
    }
    backward_step(a_, b_);
    const double change = (p_ - p_prev_).cwiseAbs().maxCoeff();
    if (change <= kTol * (1.0 + p_.cwiseAbs().maxCoeff())) {
      // Fixed point: every later iterate equals p_ and the gain is unchanged.
      trace_sum += static_cast<double>(horizon_span - j - 1) * p_.trace();
      break;
    }
  }
  return x.dot(p_ * x) + noise_scale * noise_scale * trace_sum;
}

ConstantModelEvaluator::Result ConstantModelEvaluator::evaluate(const Theta& theta,
                                                                int horizon_span,
                                                                const VectorXd& x,
                                                                double noise_scale) {
  Result r;
  r.cost = cost(theta, horizon_span, x, noise_scale);
  r.first_gain = gain_;
  return r;
}

}  // namespace ltvofu
