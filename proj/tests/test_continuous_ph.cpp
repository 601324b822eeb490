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

#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>
#include <gtest/gtest.h>

#include "cknb/continuous_ph.hpp"
#include "cknb/error.hpp"
#include "cknb/quadrature.hpp"

namespace cknb {
namespace {

const BalanceCondition kBC3 = BalanceCondition::kBC3;

DiscretePhaseType dist_of(int n, int k, double r) {
  return sntf_distribution(build_consolidated(n, k, kBC3, r));
}

ErrorKind validation_error(const ContinuousPhaseType& y) {
  try {
    y.validate();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kNonConvergence;
}

TEST(Presets, ExactParameters) {
  const auto er = ph_from_preset(ShockPreset::kErlang);
  EXPECT_EQ(er.alpha, (Eigen::RowVector2d(1, 0)));
  EXPECT_EQ(er.T, (Eigen::Matrix2d() << -2, 2, 0, -2).finished());
  const auto ex = ph_from_preset(ShockPreset::kExponential);
  EXPECT_EQ(ex.T(0, 0), -1.0);
  const auto he = ph_from_preset(ShockPreset::kHyperexponential);
  EXPECT_EQ(he.alpha, (Eigen::RowVector2d(0.5, 0.5)));
  EXPECT_DOUBLE_EQ(he.T(0, 0), -2.0 / (2.0 - std::sqrt(2.0)));
  EXPECT_DOUBLE_EQ(he.T(1, 1), -2.0 / (2.0 + std::sqrt(2.0)));
  EXPECT_EQ(he.T(0, 1), 0.0);
  EXPECT_EQ(parse_shock_preset("HE"), ShockPreset::kHyperexponential);
  EXPECT_THROW(parse_shock_preset("GAMMA"), Error);
}

TEST(PhMeanScv, TableValues) {
  const std::pair<ShockPreset, double> cases[] = {
      {ShockPreset::kErlang, 0.5},
      {ShockPreset::kExponential, 1.0},
      {ShockPreset::kHyperexponential, 2.0}};
  for (const auto& [preset, scv] : cases) {
    const MeanScv ms = ph_mean_scv(ph_from_preset(preset));
    EXPECT_NEAR(ms.mean, 1.0, 1e-12);
    EXPECT_NEAR(ms.scv, scv, 1e-12);
  }
  ContinuousPhaseType y{Eigen::RowVectorXd::Ones(1),
                        Eigen::MatrixXd::Constant(1, 1, -4.0)};
  const MeanScv ms = ph_mean_scv(y);
  EXPECT_NEAR(ms.mean, 0.25, 1e-15);
  EXPECT_NEAR(ms.scv, 1.0, 1e-12);
}

TEST(ContinuousPhaseType, ValidationRejectsMalformed) {
  ContinuousPhaseType y = ph_from_preset(ShockPreset::kErlang);
  y.alpha << 0.6, 0.6;
  EXPECT_EQ(validation_error(y), ErrorKind::kInvalidPhaseType);
  y = ph_from_preset(ShockPreset::kErlang);
  y.T(0, 1) = -1.0;
  EXPECT_EQ(validation_error(y), ErrorKind::kInvalidPhaseType);
  y = ph_from_preset(ShockPreset::kErlang);
  y.T(1, 1) = 0.0;
  EXPECT_EQ(validation_error(y), ErrorKind::kInvalidPhaseType);
  y = ph_from_preset(ShockPreset::kErlang);
  y.T << -2, 2, 2, -2;  // no exit
  EXPECT_EQ(validation_error(y), ErrorKind::kInvalidPhaseType);
  y = ph_from_preset(ShockPreset::kErlang);
  y.T.resize(3, 3);
  y.T.setIdentity();
  EXPECT_EQ(validation_error(y), ErrorKind::kInvalidPhaseType);
}

// T_Z assembled directly from the Kronecker formula.
Eigen::MatrixXd kronecker_generator(const DiscretePhaseType& d,
                                    const ContinuousPhaseType& y) {
  const Eigen::MatrixXd p = Eigen::MatrixXd(d.P);
  const Eigen::Index n = p.rows();
  const Eigen::VectorXd t = -y.T * Eigen::VectorXd::Ones(y.phases());
  const Eigen::MatrixXd restart = t * y.alpha;
  return Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(n, n), y.T)
             .eval() +
         Eigen::kroneckerProduct(p, restart).eval();
}

TEST(CompoundPh, DescriptiveCaseMatchesPrintedMagnitudes) {
  const auto z = compound_ph(dist_of(4, 2, 0.7),
                             ph_from_preset(ShockPreset::kErlang));
  ASSERT_EQ(z.dimension(), 14);
  Eigen::RowVectorXd alpha = Eigen::RowVectorXd::Zero(14);
  alpha(0) = 1.0;
  EXPECT_EQ(z.alpha(), alpha);
  const Eigen::MatrixXd tz = z.dense_generator();
  // Printed entries as (row, col, value), 1-based.
  struct Entry {
    int row, col;
    double value;
  };
  const Entry printed[] = {
      {2, 1, -0.480},  {2, 3, -0.206},  {2, 5, -0.206},  {2, 7, -0.206},
      {2, 9, -0.088},  {2, 11, -0.206}, {2, 13, -0.088}, {4, 3, -0.686},
      {4, 9, -0.294},  {6, 5, -0.686},  {6, 13, -0.294}, {8, 7, -0.686},
      {8, 9, -0.294},  {10, 9, -0.980}, {12, 11, -0.686}, {12, 13, -0.294},
      {14, 13, -0.980}};
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(14, 14);
  for (int i = 0; i < 14; ++i) {
    expected(i, i) = -2.0;
    if (i % 2 == 0) expected(i, i + 1) = 2.0;
  }
  for (const Entry& e : printed) {
    expected(e.row - 1, e.col - 1) = std::abs(e.value);
  }
  EXPECT_LE((tz - expected).cwiseAbs().maxCoeff(), 5e-4);
}

TEST(CompoundPh, IsValidSubgenerator) {
  for (auto preset : {ShockPreset::kErlang, ShockPreset::kExponential,
                      ShockPreset::kHyperexponential}) {
    const auto y = ph_from_preset(preset);
    const auto d = dist_of(6, 3, 0.6);
    const auto z = compound_ph(d, y);
    const Eigen::MatrixXd tz = z.dense_generator();
    EXPECT_LE((tz - kronecker_generator(d, y)).cwiseAbs().maxCoeff(), 1e-15);
    for (Eigen::Index i = 0; i < tz.rows(); ++i) {
      EXPECT_LT(tz(i, i), 0.0);
      for (Eigen::Index j = 0; j < tz.cols(); ++j) {
        if (i != j) EXPECT_GE(tz(i, j), 0.0);
      }
    }
    const Eigen::VectorXd exit = -tz * Eigen::VectorXd::Ones(tz.rows());
    EXPECT_LE((exit - z.exit_vector()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_GE(exit.minCoeff(), -1e-14);
    EXPECT_NEAR(z.alpha().sum(), 1.0, 1e-15);
  }
}

TEST(CompoundPh, StructuredOperationsMatchDense) {
  const auto y = ph_from_preset(ShockPreset::kHyperexponential);
  const auto d = dist_of(6, 2, 0.7);
  const auto z = compound_ph(d, y);
  const Eigen::MatrixXd tz = kronecker_generator(d, y);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(tz.rows(), 0.1, 2.0);
  EXPECT_LE((z.apply_right(x) - tz * x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((z.apply_left(x.transpose()) - x.transpose() * tz)
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  const Eigen::VectorXd solved = z.solve_negative(x);
  EXPECT_LE((-tz * solved - x).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_DOUBLE_EQ(z.uniformization_rate(), tz.diagonal().cwiseAbs().maxCoeff());
}

TEST(CompoundPh, CapacityCap) {
  const auto d = dist_of(6, 2, 0.7);
  const auto y = ph_from_preset(ShockPreset::kErlang);
  try {
    compound_ph(d, y, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCapacityExceeded);
  }
}

TEST(GeometricCompound, ExponentialClosedForm) {
  const auto y = ph_from_preset(ShockPreset::kExponential);
  for (double r : {0.3, 0.8}) {
    const auto z = compound_ph(dist_of(2, 2, r), y);
    const double rate = 1.0 - r * r;
    for (double t : {0.0, 0.5, 1.0, 3.0, 10.0}) {
      EXPECT_NEAR(pdf(z, t), rate * std::exp(-rate * t), 1e-12);
      EXPECT_NEAR(cdf_survival(z, t), std::exp(-rate * t), 1e-12);
    }
    EXPECT_NEAR(raw_moment(z, 1), 1.0 / rate, 1e-12);
    EXPECT_NEAR(raw_moment(z, 2), 2.0 / (rate * rate), 1e-10);
    EXPECT_NEAR(scv(z), 1.0, 1e-10);
  }
}

TEST(Pdf, AgreesWithMatrixExponential) {
  const auto y = ph_from_preset(ShockPreset::kErlang);
  const auto d = dist_of(4, 2, 0.7);
  const auto z = compound_ph(d, y);
  const Eigen::MatrixXd tz = kronecker_generator(d, y);
  const Eigen::VectorXd exit = -tz * Eigen::VectorXd::Ones(14);
  for (double t : {0.1, 1.0, 2.5, 7.0}) {
    const Eigen::MatrixXd e = (tz * t).exp();
    const double f = (z.alpha() * e * exit)(0);
    const double s = (z.alpha() * e * Eigen::VectorXd::Ones(14))(0);
    EXPECT_NEAR(pdf(z, t), f, 1e-12);
    EXPECT_NEAR(cdf_survival(z, t), s, 1e-12);
  }
}

TEST(Pdf, ErlangStartsAtZero) {
  const auto z = compound_ph(dist_of(4, 2, 0.7),
                             ph_from_preset(ShockPreset::kErlang));
  EXPECT_NEAR(pdf(z, 0.0), 0.0, 1e-15);
  EXPECT_EQ(cdf_survival(z, 0.0), 1.0);
}

TEST(Pdf, IntegratesToOne) {
  const auto z = compound_ph(dist_of(4, 2, 0.7),
                             ph_from_preset(ShockPreset::kErlang));
  double z_max = 1.0;
  while (cdf_survival(z, z_max) >= 1e-10) z_max *= 2.0;
  const double mass =
      adaptive_simpson([&](double t) { return pdf(z, t); }, 0.0, z_max, 1e-9);
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(Pdf, MatchesSurvivalSlope) {
  for (auto preset : {ShockPreset::kErlang, ShockPreset::kHyperexponential}) {
    const auto z = compound_ph(dist_of(6, 3, 0.7), ph_from_preset(preset));
    const double mean = raw_moment(z, 1);
    const double h = 1e-4;
    for (int i = 1; i <= 20; ++i) {
      const double t = 3.0 * mean * i / 20.0;
      const double slope =
          (cdf_survival(z, t + h) - cdf_survival(z, t - h)) / (2.0 * h);
      EXPECT_NEAR(-slope, pdf(z, t), 1e-5);
    }
  }
}

TEST(EvaluateOnGrid, MatchesPointwise) {
  const auto z = compound_ph(dist_of(6, 2, 0.6),
                             ph_from_preset(ShockPreset::kHyperexponential));
  const std::vector<double> grid = {0.0, 0.0, 0.3, 1.7, 1.7, 5.0, 40.0};
  const auto pts = evaluate_on_grid(z, grid);
  ASSERT_EQ(pts.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(pts[i].z, grid[i]);
    EXPECT_NEAR(pts[i].pdf, pdf(z, grid[i]), 1e-13);
    EXPECT_NEAR(pts[i].survival, cdf_survival(z, grid[i]), 1e-13);
  }
  EXPECT_THROW(evaluate_on_grid(z, {1.0, 0.5}), Error);
  EXPECT_THROW(pdf(z, -1.0), Error);
}

TEST(RawMoment, MttfValues) {
  for (auto preset : {ShockPreset::kErlang, ShockPreset::kExponential,
                      ShockPreset::kHyperexponential}) {
    const auto y = ph_from_preset(preset);
    EXPECT_NEAR(raw_moment(compound_ph(dist_of(12, 4, 0.5), y), 1), 1.55, 0.01);
    EXPECT_NEAR(raw_moment(compound_ph(dist_of(12, 4, 0.9), y), 1), 7.58, 0.01);
  }
}

TEST(RawMoment, WaldIdentity) {
  for (int n = 3; n <= 8; ++n) {
    for (int k = 2; k <= n; ++k) {
      for (double r : {0.3, 0.9}) {
        const auto d = dist_of(n, k, r);
        for (auto preset : {ShockPreset::kErlang, ShockPreset::kExponential,
                            ShockPreset::kHyperexponential}) {
          const auto y = ph_from_preset(preset);
          EXPECT_NEAR(raw_moment(compound_ph(d, y), 1),
                      mean_closed(d) * ph_mean_scv(y).mean, 1e-8);
        }
      }
    }
  }
}

TEST(RawMoment, AgreesWithDenseInverse) {
  const auto y = ph_from_preset(ShockPreset::kErlang);
  const auto d = dist_of(4, 2, 0.7);
  const auto z = compound_ph(d, y);
  const Eigen::MatrixXd inv = (-kronecker_generator(d, y)).inverse();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(14);
  double factorial = 1.0;
  for (int p = 1; p <= 4; ++p) {
    v = inv * v;
    factorial *= p;
    const double expected = factorial * (z.alpha() * v)(0);
    EXPECT_NEAR(raw_moment(z, p), expected, 1e-10 * expected);
  }
}

TEST(Scv, OrderingAcrossPresets) {
  for (int k : {4, 6, 8}) {
    const auto d = dist_of(12, k, 0.9);
    const double er = scv(compound_ph(d, ph_from_preset(ShockPreset::kErlang)));
    const double ex =
        scv(compound_ph(d, ph_from_preset(ShockPreset::kExponential)));
    const double he =
        scv(compound_ph(d, ph_from_preset(ShockPreset::kHyperexponential)));
    EXPECT_GT(he, ex);
    EXPECT_GT(ex, er);
    EXPECT_GT(er, 0.0);
  }
  const auto single = compound_ph(dist_of(5, 5, 0.5),
                                  ph_from_preset(ShockPreset::kErlang));
  EXPECT_GT(scv(single), 0.0);
}

TEST(Scv, IncreasesWithK) {
  for (auto preset : {ShockPreset::kErlang, ShockPreset::kExponential,
                      ShockPreset::kHyperexponential}) {
    const auto y = ph_from_preset(preset);
    double previous = 0.0;
    for (int k : {4, 6, 8}) {
      const double s = scv(compound_ph(dist_of(12, k, 0.9), y));
      EXPECT_GT(s, previous);
      previous = s;
    }
  }
}

TEST(Shape, ErlangPeaksLaterThanHyperexponential) {
  const auto d = dist_of(12, 6, 0.9);
  auto argmax = [&](ShockPreset preset) {
    const auto z = compound_ph(d, ph_from_preset(preset));
    std::vector<double> grid;
    for (int i = 0; i <= 2000; ++i) grid.push_back(0.01 * i);
    const auto pts = evaluate_on_grid(z, grid);
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].pdf > pts[best].pdf) best = i;
    }
    return grid[best];
  };
  EXPECT_GT(argmax(ShockPreset::kErlang),
            argmax(ShockPreset::kHyperexponential));
}

TEST(CustomSpec, ResolveAndDescribe) {
  ContinuousPhaseType y{Eigen::RowVectorXd::Ones(1),
                        Eigen::MatrixXd::Constant(1, 1, -3.0)};
  const InterShockSpec spec = y;
  EXPECT_EQ(resolve(spec).T(0, 0), -3.0);
  EXPECT_EQ(describe(InterShockSpec{ShockPreset::kErlang}), "ER");
  EXPECT_FALSE(describe(spec).empty());
}

}  // namespace
}  // namespace cknb
