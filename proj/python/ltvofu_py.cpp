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

// Python bindings for the ltvofu core.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltvofu/dynamics.hpp"
#include "ltvofu/estimation.hpp"
#include "ltvofu/harness.hpp"
#include "ltvofu/ofu.hpp"
#include "ltvofu/regret.hpp"
#include "ltvofu/riccati.hpp"

namespace py = pybind11;
using namespace ltvofu;

namespace {

Algorithm algorithm_from(const std::string& label) {
  const auto algo = parse_algorithm(label);
  if (!algo) throw std::invalid_argument("unknown algorithm: " + label);
  return *algo;
}

// Step logs flattened into arrays, one row per (episode, step).
py::dict steps_as_arrays(const RunRecord& rec) {
  const auto rows = static_cast<Index>(rec.steps.size());
  const Index n = rows ? rec.steps[0].x.size() : 0;
  const Index m = rows ? rec.steps[0].u.size() : 0;
  MatrixXd x(rows, n), u(rows, m);
  Eigen::VectorXi episode(rows), step(rows), index(rows);
  VectorXd cost(rows), zeta(rows), logdet(rows);
  for (Index i = 0; i < rows; ++i) {
    const StepLog& s = rec.steps[i];
    x.row(i) = s.x.transpose();
    u.row(i) = s.u.transpose();
    episode(i) = s.episode;
    step(i) = s.step;
    index(i) = s.candidate_index;
    cost(i) = s.cost;
    zeta(i) = s.zeta;
    logdet(i) = s.logdet_v;
  }
  py::dict d;
  d["episode"] = episode;
  d["step"] = step;
  d["x"] = x;
  d["u"] = u;
  d["cost"] = cost;
  d["zeta"] = zeta;
  d["logdet_v"] = logdet;
  d["candidate_index"] = index;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ltvofu, mod) {
  mod.doc() = "Online control of unknown linear time-varying systems";

  py::class_<Rng>(mod, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("normal", &Rng::normal, py::arg("stddev") = 1.0)
      .def("uniform", &Rng::uniform, py::arg("lo"), py::arg("hi"));

  py::class_<Theta>(mod, "Theta")
      .def(py::init<Index, Index>(), py::arg("n"), py::arg("m"))
      .def_static("from_ab", &Theta::from_ab, py::arg("a"), py::arg("b"))
      .def_property_readonly("a", &Theta::a)
      .def_property_readonly("b", &Theta::b)
      .def_property_readonly("matrix", [](const Theta& t) { return MatrixXd(t.matrix()); })
      .def_property_readonly("state_dim", &Theta::state_dim)
      .def_property_readonly("input_dim", &Theta::input_dim)
      .def("__eq__", [](const Theta& a, const Theta& b) { return a == b; });

  py::class_<LtvEnvironment>(mod, "Environment")
      .def_property_readonly("horizon", &LtvEnvironment::horizon)
      .def_property_readonly("episodes", &LtvEnvironment::episodes)
      .def_property_readonly("state_dim", &LtvEnvironment::state_dim)
      .def_property_readonly("input_dim", &LtvEnvironment::input_dim)
      .def_property_readonly("noise_scale", &LtvEnvironment::noise_scale)
      .def_property_readonly("q", &LtvEnvironment::q)
      .def_property_readonly("r", &LtvEnvironment::r_cost)
      .def("theta", &LtvEnvironment::theta, py::arg("k"), py::arg("h"))
      .def("with_noise_scale", &LtvEnvironment::with_noise_scale, py::arg("noise_scale"))
      .def("with_costs", &LtvEnvironment::with_costs, py::arg("q"), py::arg("r"))
      .def("variation_budget",
           [](const LtvEnvironment& env, int k) { return episode_variation_budget(env, k); },
           py::arg("k"))
      .def("total_variation_budget",
           [](const LtvEnvironment& env) { return total_variation_budget(env); })
      .def(
          "step",
          [](const LtvEnvironment& env, int k, int h, const VectorXd& x, const VectorXd& u, Rng& rng) {
            const Transition t = step(env, k, h, x, u, rng);
            return py::make_tuple(t.x_next, t.cost);
          },
          py::arg("k"), py::arg("h"), py::arg("x"), py::arg("u"), py::arg("rng"),
          "Returns (x_next, stage cost of (x, u)).");

  mod.def(
      "build_environment",
      [](const std::string& preset, int horizon, int episodes, double noise_scale,
         std::uint64_t seed) {
        return build_environment(parse_preset(preset), horizon, episodes, noise_scale, seed);
      },
      py::arg("preset"), py::arg("horizon"), py::arg("episodes"), py::arg("noise_scale") = 0.1,
      py::arg("seed") = 0);

  py::class_<GramState>(mod, "GramState")
      .def_static("restarting", &GramState::restarting, py::arg("n"), py::arg("m"),
                  py::arg("lam") = 1.0)
      .def_static("sliding", &GramState::sliding, py::arg("n"), py::arg("m"), py::arg("lam") = 1.0,
                  py::arg("window") = 20)
      .def(
          "update",
          [](GramState& s, const VectorXd& z, const VectorXd& x_next) {
            s.update({z, x_next, 0.0});
          },
          py::arg("z"), py::arg("x_next"))
      .def("reset", &GramState::reset)
      .def("point_estimate", &GramState::point_estimate)
      .def("log_det", &GramState::log_det)
      .def_property_readonly("v", &GramState::v)
      .def_property_readonly("u", &GramState::u)
      .def_property_readonly("count", &GramState::count);

  mod.def(
      "confidence_radius",
      [](const GramState& s, double delta, double noise_scale, double variation_budget, int span,
         int horizon) {
        return confidence_radius(s, {delta, noise_scale, variation_budget, span, horizon});
      },
      py::arg("state"), py::arg("delta") = 0.1, py::arg("noise_scale") = 0.1,
      py::arg("variation_budget") = 0.0, py::arg("span") = 1, py::arg("horizon") = 1);

  mod.def(
      "backward_recursion",
      [](const std::vector<Theta>& thetas, const MatrixXd& q, const MatrixXd& r) {
        const RiccatiSolution sol = backward_recursion(thetas, q, r);
        return py::make_tuple(sol.p_seq, sol.k_seq);
      },
      py::arg("thetas"), py::arg("q"), py::arg("r"),
      "Returns (P_1..P_{span+1}, K_1..K_span) for the given model sequence.");
  mod.def(
      "optimal_cost",
      [](const std::vector<Theta>& thetas, const MatrixXd& q, const MatrixXd& r, const VectorXd& x1,
         double noise_scale) {
        return optimal_cost(backward_recursion(thetas, q, r), x1, noise_scale);
      },
      py::arg("thetas"), py::arg("q"), py::arg("r"), py::arg("x1"), py::arg("noise_scale"));

  py::class_<OfuConfig>(mod, "OfuConfig")
      .def(py::init<>())
      .def_readwrite("num_candidates", &OfuConfig::num_candidates)
      .def_readwrite("perturb_scale", &OfuConfig::perturb_scale)
      .def_readwrite("epoch_length", &OfuConfig::epoch_length)
      .def_readwrite("window", &OfuConfig::window)
      .def_readwrite("lam", &OfuConfig::lambda)
      .def_readwrite("delta", &OfuConfig::delta)
      .def_readwrite("evaluate_at_current_state", &OfuConfig::evaluate_at_current_state)
      .def("validate", &OfuConfig::validate);

  py::class_<RunRecord>(mod, "RunRecord")
      .def_property_readonly("algorithm", [](const RunRecord& r) { return std::string(r.label()); })
      .def_readonly("seed", &RunRecord::seed)
      .def_readonly("resets", &RunRecord::resets)
      .def_readonly("episode_costs", &RunRecord::episode_costs)
      .def_readonly("initial_states", &RunRecord::initial_states)
      .def("steps", &steps_as_arrays);

  mod.def(
      "run_algorithm",
      [](const LtvEnvironment& env, const std::string& algo, const OfuConfig& cfg,
         std::uint64_t seed) {
        py::gil_scoped_release release;
        return run_algorithm(env, algorithm_from(algo), cfg, seed);
      },
      py::arg("env"), py::arg("algorithm"), py::arg("config") = OfuConfig{}, py::arg("seed") = 0);

  py::class_<RegretLedger>(mod, "RegretLedger")
      .def_readonly("episode_costs", &RegretLedger::episode_costs)
      .def_readonly("optimal_costs", &RegretLedger::optimal_costs)
      .def_readonly("cumulative", &RegretLedger::cumulative)
      .def_property_readonly("final_regret", &RegretLedger::final_regret);

  mod.def("make_ledger", &make_ledger, py::arg("record"), py::arg("env"));
  mod.def("episode_optimal_cost", &episode_optimal_cost, py::arg("env"), py::arg("k"), py::arg("x1"));
  mod.def("optimal_epoch_length", &optimal_epoch_length, py::arg("horizon"), py::arg("episodes"),
          py::arg("total_variation"));
  mod.def(
      "growth_exponent",
      [](const std::vector<double>& c) { return growth_exponent(c); }, py::arg("cumulative"));

  mod.def(
      "main",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv = {"ltvofu"};
        for (const auto& a : args) argv.push_back(a.c_str());
        py::gil_scoped_release release;
        return cli_main(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"), "Runs the command-line harness; returns its exit status.");
}
