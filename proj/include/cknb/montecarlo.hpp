// Copyright 2026 The cknb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CKNB_MONTECARLO_HPP_
#define CKNB_MONTECARLO_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "cknb/phase_type.hpp"
#include "cknb/system_model.hpp"

namespace cknb {

// Per-replication generator. Replication i of a run seeded with `master`
// always sees the same stream, independent of how replications are spread
// over workers: the engine seed is SplitMix64(master + (i + 1) * golden).
class ReplicationRng {
 public:
  ReplicationRng(std::uint64_t master, std::uint64_t replication);

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double exponential(double rate);

  static std::uint64_t derive_seed(std::uint64_t master,
                                   std::uint64_t replication);

 private:
  std::mt19937_64 engine_;
};

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::int64_t count = 0;
};

struct SimulationResult {
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  double half_width_95 = 0.0;
  // (probability, value) pairs at 5%, 25%, 50%, 75%, 95%.
  std::vector<std::pair<double, double>> quantiles;
  std::vector<HistogramBin> histogram;
  std::vector<double> samples;  // indexed by replication

  // Normal-approximation half width at the given two-sided level.
  double half_width(double level) const;
  // Fraction of samples <= x, with its binomial standard error.
  std::pair<double, double> fraction_at_most(double x) const;
  std::pair<double, double> fraction_equal(double x) const;
};

SimulationResult simulate_sntf(const SystemConfig& config, std::uint64_t seed,
                               std::int64_t reps, int threads = 1);

// Forward simulation of the phase process underlying y.
double sample_ph(const ContinuousPhaseType& y, ReplicationRng& rng);

// Requires config.shock.
SimulationResult simulate_ttf(const SystemConfig& config, std::uint64_t seed,
                              std::int64_t reps, int threads = 1);

// Pairwise summation; result independent of worker count.
double pairwise_sum(const double* data, std::size_t count);

}  // namespace cknb

#endif  // CKNB_MONTECARLO_HPP_
