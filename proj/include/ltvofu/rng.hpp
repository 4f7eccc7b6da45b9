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

#ifndef LTVOFU_RNG_HPP_
#define LTVOFU_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Dense>

namespace ltvofu {

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream tags. A run's noise and initial states depend only on
// (seed, episode), never on the algorithm, so runs sharing a seed are paired.
enum class StreamTag : std::uint64_t {
  kSchedule = 1,
  kInitialState = 2,
  kProcessNoise = 3,
  kCandidates = 4,
};

/// Deterministic random stream. Copyable; copies continue independently.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream keyed by a master seed and an arbitrary list of counters.
  static Rng derive(std::uint64_t seed, StreamTag tag,
                    std::initializer_list<std::uint64_t> counters = {}) {
    std::uint64_t state = mix64(seed ^ mix64(static_cast<std::uint64_t>(tag)));
    for (std::uint64_t c : counters) state = mix64(state ^ mix64(c + 0x51ed270b));
    return Rng(state);
  }

  double normal(double stddev = 1.0) {
    return std::normal_distribution<double>(0.0, 1.0)(engine_) * stddev;
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  std::size_t index(std::size_t count) {
    return std::uniform_int_distribution<std::size_t>(0, count - 1)(engine_);
  }

  Eigen::VectorXd normal_vector(Eigen::Index size, double stddev = 1.0) {
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = normal(stddev);
    return v;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ltvofu

#endif  // LTVOFU_RNG_HPP_
