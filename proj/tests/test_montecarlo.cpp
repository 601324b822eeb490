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

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "cknb/continuous_ph.hpp"
#include "cknb/error.hpp"
#include "cknb/montecarlo.hpp"

namespace cknb {
namespace {

const BalanceCondition kBC3 = BalanceCondition::kBC3;

SystemConfig config(int n, int k, double r,
                    std::optional<InterShockSpec> shock = std::nullopt) {
  return SystemConfig{n, k, r, kBC3, shock};
}

TEST(ReplicationRng, DeterministicAndDistinctStreams) {
  ReplicationRng a(7, 3), b(7, 3), c(7, 4);
  for (int i = 0; i < 5; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_NE(x, c.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  EXPECT_NE(ReplicationRng::derive_seed(1, 0), ReplicationRng::derive_seed(2, 0));
  EXPECT_NE(ReplicationRng::derive_seed(1, 0), ReplicationRng::derive_seed(1, 1));
}

TEST(PairwiseSum, MatchesNaiveOnSmallIntegers) {
  std::vector<double> v(1001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(v.data(), v.size()), 500500.0);
  EXPECT_EQ(pairwise_sum(v.data(), 0), 0.0);
}

TEST(SimulateSntf, GeometricMean) {
  const auto res = simulate_sntf(config(2, 2, 0.5), 11, 1'000'000);
  EXPECT_EQ(res.replications, 1'000'000);
  EXPECT_NEAR(res.mean, 4.0 / 3.0, 3.0 * res.half_width_95);
  EXPECT_GE(res.variance, 0.0);
}

TEST(SimulateSntf, DescriptiveCase) {
  const auto c = config(4, 2, 0.7);
  const auto res = simulate_sntf(c, 12345, 1'000'000);
  const double analytic = mean_closed(sntf_distribution(c));
  EXPECT_NEAR(res.mean, analytic, 3.0 * res.half_width_95);
  EXPECT_NEAR(res.mean, analytic, res.half_width(0.99));
  const auto [p1, se] = res.fraction_equal(1.0);
  EXPECT_NEAR(p1, 0.2601, 3.0 * se);
}

TEST(SimulateSntf, SummaryFields) {
  const auto res = simulate_sntf(config(4, 2, 0.7), 5, 20'000);
  ASSERT_EQ(res.samples.size(), 20'000u);
  EXPECT_EQ(res.seed, 5u);
  for (double s : res.samples) EXPECT_EQ(s, std::floor(s));
  EXPECT_GE(*std::min_element(res.samples.begin(), res.samples.end()), 1.0);
  std::int64_t total = 0;
  for (const auto& b : res.histogram) total += b.count;
  EXPECT_EQ(total, 20'000);
  ASSERT_EQ(res.quantiles.size(), 5u);
  for (std::size_t i = 1; i < res.quantiles.size(); ++i) {
    EXPECT_LE(res.quantiles[i - 1].second, res.quantiles[i].second);
  }
  EXPECT_NEAR(res.half_width(0.95), res.half_width_95, 1e-15);
  EXPECT_GT(res.half_width(0.99), res.half_width_95);
  EXPECT_THROW(res.half_width(0.5), Error);
}

TEST(SimulateSntf, DeterministicAcrossThreadCounts) {
  const auto c = config(8, 3, 0.6);
  const auto one = simulate_sntf(c, 99, 50'000, 1);
  const auto four = simulate_sntf(c, 99, 50'000, 4);
  EXPECT_EQ(one.samples, four.samples);
  EXPECT_EQ(one.mean, four.mean);
  EXPECT_EQ(one.variance, four.variance);
}

TEST(SimulateSntf, RejectsBadInput) {
  EXPECT_THROW(simulate_sntf(config(4, 2, 0.7), 1, 0), Error);
  EXPECT_THROW(simulate_sntf(config(4, 5, 0.7), 1, 10), Error);
}

TEST(SamplePh, PresetMoments) {
  const int draws = 1'000'000;
  const auto check = [&](ShockPreset preset, double scv) {
    const auto y = ph_from_preset(preset);
    std::vector<double> x(draws);
    for (int i = 0; i < draws; ++i) {
      ReplicationRng rng(2024, static_cast<std::uint64_t>(i));
      x[i] = sample_ph(y, rng);
      ASSERT_GT(x[i], 0.0);
    }
    const double mean = pairwise_sum(x.data(), x.size()) / draws;
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
      const double d = v - mean;
      m2 += d * d;
      m4 += d * d * d * d;
    }
    m2 /= draws;
    m4 /= draws;
    EXPECT_NEAR(mean, 1.0, 3.0 * std::sqrt(m2 / draws));
    // Delta-method standard error of the sample SCV.
    const double sample_scv = m2 / (mean * mean);
    const double se = std::sqrt((m4 - m2 * m2) / draws) / (mean * mean) +
                      2.0 * sample_scv * std::sqrt(m2 / draws) / mean;
    EXPECT_NEAR(sample_scv, scv, 3.0 * se);
  };
  check(ShockPreset::kExponential, 1.0);
  check(ShockPreset::kErlang, 0.5);
}

TEST(SamplePh, SinglePhaseGoodnessOfFit) {
  const double rate = 2.5;
  ContinuousPhaseType y{Eigen::RowVectorXd::Ones(1),
                        Eigen::MatrixXd::Constant(1, 1, -rate)};
  const int draws = 200'000;
  std::vector<double> x(draws);
  for (int i = 0; i < draws; ++i) {
    ReplicationRng rng(77, static_cast<std::uint64_t>(i));
    x[i] = sample_ph(y, rng);
  }
  std::sort(x.begin(), x.end());
  double ks = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double cdf = 1.0 - std::exp(-rate * x[i]);
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / draws),
                   std::abs(cdf - static_cast<double>(i + 1) / draws)});
  }
  // Kolmogorov-Smirnov critical value at the 0.1% level.
  EXPECT_LT(ks, 1.95 / std::sqrt(static_cast<double>(draws)));
}

TEST(SimulateTtf, DescriptiveCase) {
  const auto c = config(4, 2, 0.7, InterShockSpec{ShockPreset::kErlang});
  const auto res = simulate_ttf(c, 31, 1'000'000);
  const auto z = compound_ph(sntf_distribution(c),
                             ph_from_preset(ShockPreset::kErlang));
  EXPECT_NEAR(res.mean, raw_moment(z, 1), 3.0 * res.half_width_95);
  const auto [below, se] = res.fraction_at_most(5.0);
  EXPECT_NEAR(1.0 - below, cdf_survival(z, 5.0), 3.0 * se);
}

TEST(SimulateTtf, LargerSystemMean) {
  const auto c = config(12, 4, 0.5, InterShockSpec{ShockPreset::kExponential});
  const auto res = simulate_ttf(c, 8, 1'000'000);
  EXPECT_NEAR(res.mean, 1.55, 3.0 * res.half_width_95 + 0.01);
}

TEST(SimulateTtf, ExponentialSurvival) {
  const double r = 0.6;
  const auto c = config(2, 2, r, InterShockSpec{ShockPreset::kExponential});
  const auto res = simulate_ttf(c, 4, 200'000);
  const auto [below, se] = res.fraction_at_most(1.0);
  EXPECT_NEAR(1.0 - below, std::exp(-(1.0 - r * r)), 3.0 * se);
}

TEST(SimulateTtf, WaldHoldsEmpirically) {
  const auto c = config(6, 3, 0.7, InterShockSpec{ShockPreset::kHyperexponential});
  const auto m = simulate_sntf(c, 17, 300'000);
  const auto z = simulate_ttf(c, 17, 300'000);
  EXPECT_NEAR(z.mean, m.mean * 1.0, 3.0 * (z.half_width_95 + m.half_width_95));
}

TEST(SimulateTtf, RequiresShockLaw) {
  EXPECT_THROW(simulate_ttf(config(4, 2, 0.7), 1, 10), Error);
}

TEST(SimulateTtf, DeterministicAcrossThreadCounts) {
  const auto c = config(6, 2, 0.7, InterShockSpec{ShockPreset::kErlang});
  EXPECT_EQ(simulate_ttf(c, 3, 20'000, 1).samples,
            simulate_ttf(c, 3, 20'000, 3).samples);
}

}  // namespace
}  // namespace cknb
