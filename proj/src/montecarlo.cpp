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

#include "cknb/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "cknb/error.hpp"
#include "cknb/parallel.hpp"
#include "cknb/tiesets.hpp"

namespace cknb {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double normal_quantile_two_sided(double level) {
  if (level == 0.95) return 1.959963984540054;
  if (level == 0.99) return 2.5758293035489004;
  if (level == 0.90) return 1.6448536269514722;
  throw Error(ErrorKind::kInvalidArgument,
              "supported confidence levels are 0.90, 0.95, 0.99");
}

void require_reps(std::int64_t reps) {
  if (reps < 1) {
    throw Error(ErrorKind::kInvalidArgument, "replications must be >= 1");
  }
}

// Shock process sampler shared by the SNTF and TTF simulators.
class ShockProcess {
 public:
  explicit ShockProcess(const SystemConfig& config)
      : n_(config.n),
        r_(config.r),
        tiesets_(enumerate_min_tiesets(config.n, config.k, config.bc)) {
    if (n_ <= kMaxTableUnits) table_ = nonfailed_table(tiesets_);
  }

  std::int64_t draw(ReplicationRng& rng) const {
    StateMask mask = SystemState::all_operating(n_).mask();
    std::int64_t shocks = 0;
    do {
      ++shocks;
      for (StateMask rest = mask; rest != 0; rest &= rest - 1) {
        const StateMask bit = rest & (~rest + 1);
        if (rng.uniform() >= r_) mask &= ~bit;
      }
    } while (nonfailed(mask));
    return shocks;
  }

 private:
  bool nonfailed(StateMask mask) const {
    if (!table_.empty()) return table_[mask] != 0;
    return is_nonfailed(SystemState(n_, mask), tiesets_);
  }

  int n_;
  double r_;
  TieSetCollection tiesets_;
  std::vector<std::uint8_t> table_;
};

SimulationResult summarize(std::vector<double> samples, std::uint64_t seed,
                           bool integer_valued) {
  SimulationResult out;
  out.replications = static_cast<std::int64_t>(samples.size());
  out.seed = seed;
  const double count = static_cast<double>(samples.size());
  out.mean = pairwise_sum(samples.data(), samples.size()) / count;
  std::vector<double> sq(samples.size());
  std::transform(samples.begin(), samples.end(), sq.begin(),
                 [&](double x) { return (x - out.mean) * (x - out.mean); });
  out.variance = samples.size() > 1
                     ? pairwise_sum(sq.data(), sq.size()) / (count - 1.0)
                     : 0.0;
  out.std_error = std::sqrt(out.variance / count);
  out.half_width_95 = normal_quantile_two_sided(0.95) * out.std_error;

  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    const auto idx = static_cast<std::size_t>(
        std::min(count - 1.0, std::floor(p * (count - 1.0) + 0.5)));
    out.quantiles.emplace_back(p, sorted[idx]);
  }

  const double lo = sorted.front();
  const double hi = sorted.back();
  if (integer_valued) {
    for (double v = lo; v <= hi; v += 1.0) {
      out.histogram.push_back({v - 0.5, v + 0.5, 0});
    }
    for (double x : sorted) {
      ++out.histogram[static_cast<std::size_t>(x - lo)].count;
    }
  } else {
    constexpr int kBins = 50;
    const double width = hi > 0.0 ? hi / kBins : 1.0;
    for (int b = 0; b < kBins; ++b) {
      out.histogram.push_back({b * width, (b + 1) * width, 0});
    }
    for (double x : sorted) {
      const auto b = std::min<std::size_t>(
          kBins - 1, static_cast<std::size_t>(x / width));
      ++out.histogram[b].count;
    }
  }
  out.samples = std::move(samples);
  return out;
}

}  // namespace

ReplicationRng::ReplicationRng(std::uint64_t master, std::uint64_t replication)
    : engine_(derive_seed(master, replication)) {}

std::uint64_t ReplicationRng::derive_seed(std::uint64_t master,
                                          std::uint64_t replication) {
  return splitmix64(master + (replication + 1) * 0x9E3779B97F4A7C15ULL);
}

double ReplicationRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double ReplicationRng::exponential(double rate) {
  return -std::log1p(-uniform()) / rate;
}

double SimulationResult::half_width(double level) const {
  return normal_quantile_two_sided(level) * std_error;
}

std::pair<double, double> SimulationResult::fraction_at_most(double x) const {
  const auto hits = std::count_if(samples.begin(), samples.end(),
                                  [x](double s) { return s <= x; });
  const double p = static_cast<double>(hits) / samples.size();
  return {p, std::sqrt(p * (1.0 - p) / samples.size())};
}

std::pair<double, double> SimulationResult::fraction_equal(double x) const {
  const auto hits = std::count(samples.begin(), samples.end(), x);
  const double p = static_cast<double>(hits) / samples.size();
  return {p, std::sqrt(p * (1.0 - p) / samples.size())};
}

double pairwise_sum(const double* data, std::size_t count) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += data[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

SimulationResult simulate_sntf(const SystemConfig& config, std::uint64_t seed,
                               std::int64_t reps, int threads) {
  config.validate();
  require_reps(reps);
  const ShockProcess process(config);
  std::vector<double> samples(reps);
  parallel_for(reps, threads, [&](std::int64_t i) {
    ReplicationRng rng(seed, static_cast<std::uint64_t>(i));
    samples[i] = static_cast<double>(process.draw(rng));
  });
  return summarize(std::move(samples), seed, true);
}

double sample_ph(const ContinuousPhaseType& y, ReplicationRng& rng) {
  const Eigen::Index k = y.phases();
  const Eigen::VectorXd exit = y.exit_rates();
  auto pick = [&](auto weight, double total) {
    double u = rng.uniform() * total;
    for (Eigen::Index j = 0; j < k; ++j) {
      u -= weight(j);
      if (u < 0.0) return j;
    }
    return Eigen::Index{-1};
  };

  Eigen::Index phase = pick([&](Eigen::Index j) { return y.alpha(j); }, 1.0);
  if (phase < 0) phase = k - 1;
  double elapsed = 0.0;
  while (true) {
    const double rate = -y.T(phase, phase);
    elapsed += rng.exponential(rate);
    const Eigen::Index from = phase;
    // Index -1 means leaving through the exit.
    const Eigen::Index next = pick(
        [&](Eigen::Index j) { return j == from ? 0.0 : y.T(from, j); }, rate);
    if (next < 0) return elapsed;
    phase = next;
  }
}

SimulationResult simulate_ttf(const SystemConfig& config, std::uint64_t seed,
                              std::int64_t reps, int threads) {
  config.validate();
  require_reps(reps);
  if (!config.shock) {
    throw Error(ErrorKind::kInvalidArgument,
                "time-to-failure simulation needs an inter-shock law");
  }
  const ContinuousPhaseType y = resolve(*config.shock);
  const ShockProcess process(config);
  std::vector<double> samples(reps);
  parallel_for(reps, threads, [&](std::int64_t i) {
    ReplicationRng rng(seed, static_cast<std::uint64_t>(i));
    const std::int64_t shocks = process.draw(rng);
    double total = 0.0;
    for (std::int64_t s = 0; s < shocks; ++s) total += sample_ph(y, rng);
    samples[i] = total;
  });
  return summarize(std::move(samples), seed, false);
}

}  // namespace cknb
