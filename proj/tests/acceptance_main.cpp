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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ltvofu/estimation.hpp"
#include "ltvofu/harness.hpp"
#include "ltvofu/ofu.hpp"
#include "ltvofu/regret.hpp"
#include "ltvofu/riccati.hpp"

namespace {

using namespace ltvofu;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const std::string& id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s [%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

void estimator_oracle() {
  const auto t0 = Clock::now();
  double worst_estimate = 0.0, worst_window = 0.0;
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.index(3));
    const Index m = 1 + static_cast<Index>(rng.index(3));
    const int count = 1 + static_cast<int>(rng.index(200));
    const int window = 1 + static_cast<int>(rng.index(60));
    const double lambda = std::pow(10.0, rng.uniform(-3.0, 1.0));
    MatrixXd truth = MatrixXd::NullaryExpr(n + m, n, [&] { return rng.normal(0.5); });

    GramState full = GramState::restarting(n, m, lambda);
    GramState sliding = GramState::sliding(n, m, lambda, window);
    std::vector<VectorXd> zs, xs;
    for (int t = 0; t < count; ++t) {
      const VectorXd z = rng.normal_vector(n + m);
      const VectorXd x = truth.transpose() * z + rng.normal_vector(n, 0.1);
      full.update({z, x, 0.0});
      sliding.update({z, x, 0.0});
      zs.push_back(z);
      xs.push_back(x);
    }
    // from-scratch normal equations
    MatrixXd zmat(count, n + m), xmat(count, n);
    for (int t = 0; t < count; ++t) {
      zmat.row(t) = zs[t].transpose();
      xmat.row(t) = xs[t].transpose();
    }
    const MatrixXd v = lambda * MatrixXd::Identity(n + m, n + m) + zmat.transpose() * zmat;
    const MatrixXd direct = v.colPivHouseholderQr().solve(zmat.transpose() * xmat);
    const MatrixXd est = full.point_estimate().matrix();
    worst_estimate = std::max(worst_estimate, (est - direct).norm() / std::max(direct.norm(), 1e-300));

    const int first = std::max(0, count - window);
    MatrixXd vw = lambda * MatrixXd::Identity(n + m, n + m);
    MatrixXd uw = MatrixXd::Zero(n + m, n);
    for (int t = first; t < count; ++t) {
      vw += zs[t] * zs[t].transpose();
      uw += zs[t] * xs[t].transpose();
    }
    worst_window = std::max({worst_window, (sliding.v() - vw).norm() / vw.norm(),
                             (sliding.u() - uw).norm() / std::max(uw.norm(), 1e-300)});
  }
  const double secs = seconds_since(t0);
  report("1", "estimator oracle equivalence",
         worst_estimate <= 1e-8 && worst_window <= 1e-9 && secs < 10.0,
         fmt("max estimate rel err %.3g (<= 1e-8), max window rel err %.3g (<= 1e-9), %.2fs (< 10s)",
             worst_estimate, worst_window, secs));
}

void confidence_coverage() {
  const auto t0 = Clock::now();
  const int horizon = 100, seeds = 200;
  OfuConfig cfg;
  cfg.delta = 0.1;
  cfg.lambda = 1.0;
  cfg.epoch_length = horizon;
  cfg.window = horizon;
  long covered_r = 0, covered_sw = 0, total = 0;
  for (int s = 0; s < seeds; ++s) {
    const auto env = build_environment(Preset::kLti, horizon, 1, 0.1, s);
    const auto r = run_r_ofu(env, cfg, s);
    const auto sw = run_sw_ofu(env, cfg, s);
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
      covered_r += r.steps[i].truth_distance <= r.steps[i].zeta;
      covered_sw += sw.steps[i].truth_distance <= sw.steps[i].zeta;
      ++total;
    }
  }
  const double fr = static_cast<double>(covered_r) / total;
  const double fsw = static_cast<double>(covered_sw) / total;
  const double secs = seconds_since(t0);
  report("2", "confidence coverage", fr >= 0.90 && fsw >= 0.90 && secs < 120.0,
         fmt("R %.4f, SW %.4f (>= 0.90), %.1fs (< 120s)", fr, fsw, secs));
}

void riccati_correctness() {
  const MatrixXd one = MatrixXd::Identity(1, 1);
  const auto sol = backward_recursion(Theta::from_ab(one, one), one, one, 50);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  const double gap = std::abs(sol.p_seq.front()(0, 0) - golden);

  Rng rng(7);
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.index(3));
    const Index m = 1 + static_cast<Index>(rng.index(3));
    const MatrixXd a = MatrixXd::NullaryExpr(n, n, [&] { return rng.normal(0.7); });
    const MatrixXd b = MatrixXd::NullaryExpr(n, m, [&] { return rng.normal(0.7); });
    const MatrixXd gq = MatrixXd::NullaryExpr(n, n, [&] { return rng.normal(); });
    const MatrixXd gr = MatrixXd::NullaryExpr(m, m, [&] { return rng.normal(); });
    const MatrixXd q = gq * gq.transpose() + 0.1 * MatrixXd::Identity(n, n);
    const MatrixXd r = gr * gr.transpose() + 0.1 * MatrixXd::Identity(m, m);
    const int span = 2 + static_cast<int>(rng.index(5));
    const auto s = backward_recursion(Theta::from_ab(a, b), q, r, span);
    const MatrixXd& p_next = s.p_seq[1];
    const VectorXd x = rng.normal_vector(n);
    auto bellman = [&](const VectorXd& u) {
      const VectorXd xn = a * x + b * u;
      return x.dot(q * x) + u.dot(r * u) + xn.dot(p_next * xn);
    };
    const double at_gain = bellman(s.k_seq.front() * x);
    for (int i = 0; i < 100; ++i) {
      const double c = bellman(rng.normal_vector(m, 2.0));
      worst_margin = std::min(worst_margin, (c - at_gain) / (1.0 + std::abs(at_gain)));
    }
  }
  report("3", "riccati correctness", gap <= 1e-6 && worst_margin >= -1e-9,
         fmt("|P - golden| %.3g (<= 1e-6), min Bellman margin %.3g (>= -1e-9)", gap, worst_margin));
}

// Scalar finite-horizon cost, independent of the library's recursion.
double scalar_cost(double a, double b, int span, double x, double noise) {
  double p = 0.0, trace_sum = 0.0;
  for (int i = 0; i < span; ++i) {
    trace_sum += p;
    p = 1.0 + a * a * p - (a * b * p) * (a * b * p) / (1.0 + b * b * p);
  }
  return p * x * x + noise * noise * trace_sum;
}

void selection_oracle() {
  const int span = 20;
  const double x = 1.0, noise = 0.1;
  ConfidenceEllipsoid ell;
  ell.center = Theta::from_ab(MatrixXd::Constant(1, 1, 0.9), MatrixXd::Constant(1, 1, 0.4));
  ell.shaping.resize(2, 2);
  ell.shaping << 4.0, 1.0, 1.0, 2.0;
  ell.radius = 0.5;
  // bounding box of the ellipse: half-widths radius * sqrt(diag(V^{-1}))
  const MatrixXd vinv = ell.shaping.inverse();
  const double wa = ell.radius * std::sqrt(vinv(0, 0)) * 1.2;
  const double wb = ell.radius * std::sqrt(vinv(1, 1)) * 1.2;
  const double ca = 0.9, cb = 0.4;

  std::vector<Theta> candidates;
  const int side = 100;
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      const double a = ca - wa + 2.0 * wa * i / (side - 1);
      const double b = cb - wb + 2.0 * wb * j / (side - 1);
      candidates.push_back(project(
          ell, Theta::from_ab(MatrixXd::Constant(1, 1, a), MatrixXd::Constant(1, 1, b))));
    }
  }
  const auto choice = select_optimistic(candidates, MatrixXd::Identity(1, 1),
                                        MatrixXd::Identity(1, 1), span, VectorXd::Constant(1, x), noise);

  // dense search: fine grid over the interior plus a dense boundary parameterization
  double best = std::numeric_limits<double>::infinity();
  const int fine = 1500;
  auto consider = [&](double a, double b) {
    const double da = a - ca, db = b - cb;
    const double d2 = 4.0 * da * da + 2.0 * da * db + 2.0 * db * db;
    if (d2 <= ell.radius * ell.radius * (1.0 + 1e-12)) best = std::min(best, scalar_cost(a, b, span, x, noise));
  };
  for (int i = 0; i < fine; ++i) {
    for (int j = 0; j < fine; ++j) {
      consider(ca - wa + 2.0 * wa * i / (fine - 1), cb - wb + 2.0 * wb * j / (fine - 1));
    }
  }
  const Eigen::LLT<MatrixXd> llt(ell.shaping);
  const MatrixXd linv = llt.matrixU().solve(MatrixXd::Identity(2, 2));  // V = U^T U
  for (int t = 0; t < 200000; ++t) {
    const double phi = 2.0 * M_PI * t / 200000.0;
    const Eigen::Vector2d d = linv * Eigen::Vector2d(std::cos(phi), std::sin(phi)) * ell.radius;
    consider(ca + d(0), cb + d(1));
  }
  const double rel = std::abs(choice.cost - best) / best;
  report("4", "OFU selection oracle", rel <= 1e-4,
         fmt("selected J* %.10g, dense-grid J* %.10g, rel diff %.3g (<= 1e-4)", choice.cost, best, rel));
}

void figure_reproduction() {
  const auto t0 = Clock::now();
  auto sweep = [](Preset preset) {
    ExperimentConfig cfg;
    cfg.env = preset;
    cfg.horizon = 100;
    cfg.episodes = 100;
    cfg.seeds = {0, 1, 2, 3, 4};
    cfg.algorithms = {Algorithm::kROfu, Algorithm::kSwOfu, Algorithm::kOracleLqr};
    return summarize(run_sweep(cfg));
  };
  auto find = [](const std::vector<AlgorithmSummary>& s, const char* label) {
    for (const auto& a : s) if (a.algorithm == label) return a;
    return AlgorithmSummary{label, std::nan(""), std::nan(""), std::nan(""), std::nan("")};
  };
  const auto sw = sweep(Preset::kSwitching);
  const auto fr = sweep(Preset::kFrequent);
  const auto sl = sweep(Preset::kSlow);
  const double secs = seconds_since(t0);
  const bool in_time = secs < 600.0;

  const auto r = find(sw, "r-ofu"), s = find(sw, "sw-ofu"), o = find(sw, "oracle-lqr");
  report("5a", "switching: OFU regret at least 2x below oracle-lqr",
         2.0 * r.final_mean_regret <= o.final_mean_regret &&
             2.0 * s.final_mean_regret <= o.final_mean_regret && in_time,
         fmt("r-ofu %.6g, sw-ofu %.6g, oracle-lqr %.6g", r.final_mean_regret, s.final_mean_regret,
             o.final_mean_regret));
  report("5b", "switching: R-OFU growth exponent", r.growth <= 0.95 && in_time,
         fmt("%.4f (<= 0.95)", r.growth));
  const auto fr_r = find(fr, "r-ofu"), fr_s = find(fr, "sw-ofu");
  report("5c", "frequent: R-OFU final regret <= SW-OFU",
         fr_r.final_mean_regret <= fr_s.final_mean_regret && in_time,
         fmt("r-ofu %.6g, sw-ofu %.6g", fr_r.final_mean_regret, fr_s.final_mean_regret));
  const auto sl_r = find(sl, "r-ofu"), sl_s = find(sl, "sw-ofu");
  report("5d", "slow: SW-OFU final regret <= R-OFU",
         sl_s.final_mean_regret <= sl_r.final_mean_regret && in_time,
         fmt("sw-ofu %.6g, r-ofu %.6g; sweep time %.1fs (< 600s)", sl_s.final_mean_regret,
             sl_r.final_mean_regret, secs));
}

void ledger_sanity() {
  const auto env = build_environment(Preset::kSwitching, 100, 5, 0.1, 0);
  std::vector<double> per_episode;
  for (int s = 0; s < 200; ++s) {
    const auto ledger = make_ledger(run_baseline(env, Algorithm::kOmniscient, s), env);
    per_episode.push_back(ledger.final_regret() / static_cast<double>(ledger.size()));
  }
  const double mean = mean_of(per_episode), se = stderr_of(per_episode);

  double worst = 0.0;
  for (Preset p : {Preset::kSwitching, Preset::kSlow, Preset::kFrequent, Preset::kLti}) {
    const auto quiet = build_environment(p, 100, 5, 0.0, 1);
    const auto ledger = make_ledger(run_baseline(quiet, Algorithm::kOmniscient, 1), quiet);
    for (std::size_t i = 0; i < ledger.size(); ++i) {
      worst = std::max(worst, std::abs(ledger.regret(i)) / (1.0 + ledger.optimal_costs[i]));
    }
  }
  report("6", "regret ledger sanity", std::abs(mean) <= 2.0 * se && worst <= 1e-10,
         fmt("omniscient mean per-episode regret %.4g, 2 SE %.4g; noiseless max rel |regret| %.3g "
             "(<= 1e-10, floating point)",
             mean, 2.0 * se, worst));
}

void epoch_tuner() {
  const int base = optimal_epoch_length(100, 100, 10.0);
  bool monotone = true;
  int prev = optimal_epoch_length(100, 100, 1e-3);
  for (double b = 2e-3; b < 1e6; b *= 1.3) {
    const int l = optimal_epoch_length(100, 100, b);
    monotone = monotone && l <= prev;
    prev = l;
  }
  report("7", "epoch length tuner", base == 100 && monotone && prev < base,
         fmt("L(100,100,10) = %d (== 100), monotone non-increasing %s, L at B=1e6 is %d", base,
             monotone ? "yes" : "no", prev));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

void determinism_and_csv() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "ltvofu_acceptance";
  fs::remove_all(root);
  ExperimentConfig cfg;
  cfg.env = Preset::kSwitching;
  cfg.horizon = 30;
  cfg.episodes = 4;
  cfg.seeds = {0, 1, 2};
  cfg.algorithms = {Algorithm::kROfu, Algorithm::kSwOfu};
  std::ostringstream log;
  bool ok = true;
  for (auto [name, jobs] : {std::pair{"a", 1}, std::pair{"b", 1}, std::pair{"c", 3}}) {
    cfg.out_dir = (root / name).string();
    cfg.jobs = jobs;
    ok = ok && run_experiment(cfg, log) == 0;
  }
  bool identical = ok;
  std::size_t steps = 0, regret = 0, summary = 0;
  for (const char* file : {"steps.csv", "regret.csv", "summary.csv"}) {
    const std::string a = slurp(root / "a" / file);
    identical = identical && !a.empty() && a == slurp(root / "b" / file) &&
                a == slurp(root / "c" / file);
  }
  steps = count_lines(slurp(root / "a" / "steps.csv"));
  regret = count_lines(slurp(root / "a" / "regret.csv"));
  summary = count_lines(slurp(root / "a" / "summary.csv"));
  const std::size_t a = 2, s = 3, k = 4, h = 30;
  const bool rows = steps == 1 + a * s * k * h && regret == 1 + a * s * k && summary == 1 + a * k;
  fs::remove_all(root);
  report("8", "determinism and CSV contracts", identical && rows,
         fmt("byte-identical across reruns and jobs 1/3: %s; rows steps %zu (%zu), regret %zu (%zu), "
             "summary %zu (%zu)",
             identical ? "yes" : "no", steps, 1 + a * s * k * h, regret, 1 + a * s * k, summary,
             1 + a * k));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {
      estimator_oracle, confidence_coverage, riccati_correctness, selection_oracle,
      figure_reproduction, ledger_sanity, epoch_tuner, determinism_and_csv};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      report("?", "criterion threw", false, e.what());
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
