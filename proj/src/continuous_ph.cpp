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

#include "cknb/continuous_ph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "cknb/error.hpp"

namespace cknb {

namespace {

constexpr double kPoissonTail = 1e-14;
constexpr long kMaxPoissonTerms = 1'000'000;
// Poisson means per uniformization substep stay at or below this value so
// exp(-lambda) never underflows.
constexpr double kMaxStepMean = 30.0;

double factorial(int p) {
  double out = 1.0;
  for (int i = 2; i <= p; ++i) out *= i;
  return out;
}

}  // namespace

// --- ContinuousPhaseType / presets -------------------------------------

Eigen::VectorXd ContinuousPhaseType::exit_rates() const {
  return -(T * Eigen::VectorXd::Ones(T.rows()));
}

void ContinuousPhaseType::validate() const {
  auto fail = [](const std::string& why) {
    throw Error(ErrorKind::kInvalidPhaseType, "invalid phase-type law: " + why);
  };
  const Eigen::Index k = alpha.size();
  if (k < 1) fail("no phases");
  if (T.rows() != k || T.cols() != k) fail("T must be K x K with K = |alpha|");
  if ((alpha.array() < 0.0).any()) fail("alpha has a negative entry");
  if (std::abs(alpha.sum() - 1.0) > 1e-12) fail("alpha must sum to 1");
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(T(i, i) < 0.0)) fail("diagonal of T must be strictly negative");
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i != j && T(i, j) < 0.0) fail("off-diagonal of T must be >= 0");
    }
  }
  const Eigen::VectorXd exit = exit_rates();
  if ((exit.array() < -1e-12).any()) fail("row sums of T must be <= 0");
  if (!(exit.maxCoeff() > 0.0)) fail("no phase has a positive exit rate");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(T);
  if (!lu.isInvertible()) fail("T is singular; absorption is not certain");
}

const char* to_string(ShockPreset preset) {
  switch (preset) {
    case ShockPreset::kErlang: return "ER";
    case ShockPreset::kExponential: return "EXP";
    case ShockPreset::kHyperexponential: return "HE";
  }
  return "?";
}

ShockPreset parse_shock_preset(const std::string& label) {
  if (label == "ER") return ShockPreset::kErlang;
  if (label == "EXP") return ShockPreset::kExponential;
  if (label == "HE") return ShockPreset::kHyperexponential;
  throw Error(ErrorKind::kInvalidArgument,
              "unknown inter-shock preset '" + label + "'");
}

ContinuousPhaseType ph_from_preset(ShockPreset preset) {
  ContinuousPhaseType y;
  switch (preset) {
    case ShockPreset::kErlang:
      y.alpha = Eigen::RowVector2d(1.0, 0.0);
      y.T.resize(2, 2);
      y.T << -2.0, 2.0, 0.0, -2.0;
      break;
    case ShockPreset::kExponential:
      y.alpha = Eigen::RowVectorXd::Ones(1);
      y.T = Eigen::MatrixXd::Constant(1, 1, -1.0);
      break;
    case ShockPreset::kHyperexponential: {
      const double root2 = std::sqrt(2.0);
      y.alpha = Eigen::RowVector2d(0.5, 0.5);
      y.T = Eigen::MatrixXd::Zero(2, 2);
      y.T(0, 0) = -2.0 / (2.0 - root2);
      y.T(1, 1) = -2.0 / (2.0 + root2);
      break;
    }
  }
  return y;
}

ContinuousPhaseType resolve(const InterShockSpec& spec) {
  if (const auto* preset = std::get_if<ShockPreset>(&spec)) {
    return ph_from_preset(*preset);
  }
  return std::get<ContinuousPhaseType>(spec);
}

std::string describe(const InterShockSpec& spec) {
  if (const auto* preset = std::get_if<ShockPreset>(&spec)) {
    return to_string(*preset);
  }
  std::ostringstream out;
  out << "custom(K=" << std::get<ContinuousPhaseType>(spec).phases() << ")";
  return out.str();
}

MeanScv ph_mean_scv(const ContinuousPhaseType& y) {
  y.validate();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(-y.T);
  const Eigen::VectorXd first = lu.solve(Eigen::VectorXd::Ones(y.phases()));
  const Eigen::VectorXd second = lu.solve(first);
  const double mean = y.alpha.dot(first);
  const double m2 = 2.0 * y.alpha.dot(second);
  return {mean, m2 / (mean * mean) - 1.0};
}

// --- CompoundPhaseType --------------------------------------------------

CompoundPhaseType::CompoundPhaseType(const DiscretePhaseType& shocks,
                                     const ContinuousPhaseType& inter_shock)
    : alpha_d_(shocks.alpha),
      P_(shocks.P),
      shock_exit_(shocks.exit),
      inter_shock_(inter_shock),
      t_(inter_shock.exit_rates()),
      states_(shocks.phases()),
      phases_(inter_shock.phases()) {
  inter_shock_.validate();
  const Eigen::MatrixXd feedback = t_ * inter_shock_.alpha;
  const Eigen::VectorXd diag = P_.diagonal();
  diagonal_blocks_.reserve(states_);
  for (Eigen::Index a = 0; a < states_; ++a) {
    const Eigen::MatrixXd block = -(inter_shock_.T + diag(a) * feedback);
    diagonal_blocks_.emplace_back(block);
  }
}

Eigen::RowVectorXd CompoundPhaseType::alpha() const {
  Eigen::RowVectorXd out(dimension());
  for (Eigen::Index a = 0; a < states_; ++a) {
    out.segment(a * phases_, phases_) = alpha_d_(a) * inter_shock_.alpha;
  }
  return out;
}

Eigen::VectorXd CompoundPhaseType::exit_vector() const {
  Eigen::VectorXd out(dimension());
  for (Eigen::Index a = 0; a < states_; ++a) {
    out.segment(a * phases_, phases_) = shock_exit_(a) * t_;
  }
  return out;
}

Eigen::RowVectorXd CompoundPhaseType::apply_left(
    const Eigen::RowVectorXd& v) const {
  Eigen::RowVectorXd flow(states_);
  for (Eigen::Index a = 0; a < states_; ++a) {
    flow(a) = v.segment(a * phases_, phases_).dot(t_);
  }
  const Eigen::RowVectorXd arrivals = flow * P_;
  Eigen::RowVectorXd out(dimension());
  for (Eigen::Index b = 0; b < states_; ++b) {
    out.segment(b * phases_, phases_) =
        v.segment(b * phases_, phases_) * inter_shock_.T +
        arrivals(b) * inter_shock_.alpha;
  }
  return out;
}

Eigen::VectorXd CompoundPhaseType::apply_right(const Eigen::VectorXd& x) const {
  Eigen::VectorXd restart(states_);
  for (Eigen::Index b = 0; b < states_; ++b) {
    restart(b) = inter_shock_.alpha.dot(x.segment(b * phases_, phases_));
  }
  const Eigen::VectorXd pulled = P_ * restart;
  Eigen::VectorXd out(dimension());
  for (Eigen::Index a = 0; a < states_; ++a) {
    out.segment(a * phases_, phases_) =
        inter_shock_.T * x.segment(a * phases_, phases_) + pulled(a) * t_;
  }
  return out;
}

Eigen::VectorXd CompoundPhaseType::solve_negative(
    const Eigen::VectorXd& b) const {
  Eigen::VectorXd x(dimension());
  // restart(a) = alpha_c . x_a, needed by every row above a.
  Eigen::VectorXd restart = Eigen::VectorXd::Zero(states_);
  for (Eigen::Index a = states_ - 1; a >= 0; --a) {
    double coupling = 0.0;
    for (SparseRowMatrix::InnerIterator it(P_, a); it; ++it) {
      if (it.col() > a) {
        coupling += it.value() * restart(it.col());
      } else if (it.col() < a) {
        throw Error(ErrorKind::kInvalidArgument,
                    "subtransition matrix is not upper triangular");
      }
    }
    const Eigen::VectorXd rhs = b.segment(a * phases_, phases_) + coupling * t_;
    Eigen::VectorXd xa = diagonal_blocks_[a].solve(rhs);
    if (!xa.allFinite()) {
      throw Error(ErrorKind::kSingularSystem, "-T_Z is singular");
    }
    x.segment(a * phases_, phases_) = xa;
    restart(a) = inter_shock_.alpha.dot(xa);
  }
  return x;
}

double CompoundPhaseType::uniformization_rate() const {
  const Eigen::VectorXd diag = P_.diagonal();
  double rate = 0.0;
  for (Eigen::Index a = 0; a < states_; ++a) {
    for (Eigen::Index i = 0; i < phases_; ++i) {
      const double d =
          inter_shock_.T(i, i) + diag(a) * t_(i) * inter_shock_.alpha(i);
      rate = std::max(rate, std::abs(d));
    }
  }
  return rate;
}

Eigen::MatrixXd CompoundPhaseType::dense_generator() const {
  if (dimension() > kDenseLimit) {
    throw Error(ErrorKind::kCapacityExceeded,
                "dense T_Z limited to dimension <= " +
                    std::to_string(kDenseLimit));
  }
  const Eigen::MatrixXd feedback = t_ * inter_shock_.alpha;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dimension(), dimension());
  for (Eigen::Index a = 0; a < states_; ++a) {
    out.block(a * phases_, a * phases_, phases_, phases_) = inter_shock_.T;
    for (SparseRowMatrix::InnerIterator it(P_, a); it; ++it) {
      out.block(a * phases_, it.col() * phases_, phases_, phases_) +=
          it.value() * feedback;
    }
  }
  return out;
}

CompoundPhaseType compound_ph(const DiscretePhaseType& shocks,
                              const ContinuousPhaseType& inter_shock,
                              Eigen::Index max_dimension) {
  const Eigen::Index dim = shocks.phases() * inter_shock.phases();
  if (dim > max_dimension) {
    throw Error(ErrorKind::kCapacityExceeded,
                "compound phase count " + std::to_string(dim) +
                    " exceeds the cap " + std::to_string(max_dimension));
  }
  return CompoundPhaseType(shocks, inter_shock);
}

// --- transient evaluation ----------------------------------------------

namespace {

// v <- v exp(h T_Z), Poisson-weighted powers of I + T_Z / rate.
void uniformized_step(const CompoundPhaseType& z_law, double rate, double h,
                      Eigen::RowVectorXd& v) {
  const double lambda = rate * h;
  if (lambda <= 0.0) return;
  Eigen::RowVectorXd term = v;
  double weight = std::exp(-lambda);
  double mass = weight;
  Eigen::RowVectorXd acc = weight * term;
  for (long k = 1;; ++k) {
    if (k > kMaxPoissonTerms) {
      throw Error(ErrorKind::kNonConvergence,
                  "uniformization series exceeded 1e6 terms");
    }
    term += z_law.apply_left(term) / rate;
    weight *= lambda / static_cast<double>(k);
    mass += weight;
    acc += weight * term;
    if (1.0 - mass <= kPoissonTail ||
        (static_cast<double>(k) > lambda && weight < 1e-300)) {
      break;
    }
  }
  v = acc;
}

}  // namespace

std::vector<DensityPoint> evaluate_on_grid(const CompoundPhaseType& z_law,
                                           const std::vector<double>& grid) {
  const double rate = z_law.uniformization_rate();
  const Eigen::VectorXd exit = z_law.exit_vector();
  Eigen::RowVectorXd v = z_law.alpha();
  double now = 0.0;
  std::vector<DensityPoint> out;
  out.reserve(grid.size());
  for (double z : grid) {
    if (!(z >= now)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "time grid must be nonnegative and nondecreasing");
    }
    const double span = z - now;
    const int substeps =
        std::max(1, static_cast<int>(std::ceil(rate * span / kMaxStepMean)));
    for (int s = 0; s < substeps; ++s) {
      uniformized_step(z_law, rate, span / substeps, v);
    }
    now = z;
    out.push_back({z, std::max(0.0, v.dot(exit)), std::max(0.0, v.sum())});
  }
  return out;
}

double pdf(const CompoundPhaseType& z_law, double z) {
  return evaluate_on_grid(z_law, {z}).front().pdf;
}

double cdf_survival(const CompoundPhaseType& z_law, double z) {
  return evaluate_on_grid(z_law, {z}).front().survival;
}

double raw_moment(const CompoundPhaseType& z_law, int p) {
  if (p < 1) throw Error(ErrorKind::kInvalidArgument, "p must be >= 1");
  Eigen::VectorXd x = Eigen::VectorXd::Ones(z_law.dimension());
  for (int i = 0; i < p; ++i) x = z_law.solve_negative(x);
  return factorial(p) * z_law.alpha().dot(x);
}

double scv(const CompoundPhaseType& z_law) {
  const double m1 = raw_moment(z_law, 1);
  const double m2 = raw_moment(z_law, 2);
  return (m2 - m1 * m1) / (m1 * m1);
}

}  // namespace cknb
