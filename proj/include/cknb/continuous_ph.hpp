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

#ifndef CKNB_CONTINUOUS_PH_HPP_
#define CKNB_CONTINUOUS_PH_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "cknb/discrete_ph.hpp"
#include "cknb/phase_type.hpp"

namespace cknb {

struct MeanScv {
  double mean = 0.0;
  double scv = 0.0;
};

MeanScv ph_mean_scv(const ContinuousPhaseType& y);

inline constexpr Eigen::Index kDefaultCompoundCap = Eigen::Index{1} << 20;
inline constexpr Eigen::Index kDenseLimit = 4096;

// Time to failure Z = Y_1 + ... + Y_M with
//   alpha_Z = alpha_d (x) alpha_c,
//   T_Z     = I (x) T_c + P (x) (t alpha_c),  t = -T_c e.
// T_Z is never stored; products and solves run on the Kronecker factors.
// Phase (a, i) of Z has flat index a * K + i.
class CompoundPhaseType {
 public:
  CompoundPhaseType(const DiscretePhaseType& shocks,
                    const ContinuousPhaseType& inter_shock);

  Eigen::Index dimension() const { return states_ * phases_; }
  Eigen::Index shock_states() const { return states_; }
  Eigen::Index phases() const { return phases_; }
  const ContinuousPhaseType& inter_shock() const { return inter_shock_; }

  Eigen::RowVectorXd alpha() const;
  // -T_Z e; phase (a, i) exits at rate t_i * (1 - row sum a of P).
  Eigen::VectorXd exit_vector() const;
  // v T_Z for a row vector v.
  Eigen::RowVectorXd apply_left(const Eigen::RowVectorXd& v) const;
  // T_Z x for a column vector x.
  Eigen::VectorXd apply_right(const Eigen::VectorXd& x) const;
  // Solves -T_Z x = b by block back-substitution.
  Eigen::VectorXd solve_negative(const Eigen::VectorXd& b) const;
  // Largest |diagonal entry| of T_Z.
  double uniformization_rate() const;
  // Materialized T_Z; only for dimension() <= kDenseLimit.
  Eigen::MatrixXd dense_generator() const;

 private:
  Eigen::RowVectorXd alpha_d_;
  SparseRowMatrix P_;
  Eigen::VectorXd shock_exit_;
  ContinuousPhaseType inter_shock_;
  Eigen::VectorXd t_;
  Eigen::Index states_;
  Eigen::Index phases_;
  // LU of -(T_c + P_aa t alpha_c) for each shock state a.
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> diagonal_blocks_;
};

// Throws Error(kCapacityExceeded) when N * K exceeds max_dimension.
CompoundPhaseType compound_ph(const DiscretePhaseType& shocks,
                              const ContinuousPhaseType& inter_shock,
                              Eigen::Index max_dimension = kDefaultCompoundCap);

struct DensityPoint {
  double z = 0.0;
  double pdf = 0.0;
  double survival = 0.0;
};

// Transient distribution alpha_Z exp(z T_Z) by uniformization, marched
// across a nondecreasing grid of times starting at 0.
std::vector<DensityPoint> evaluate_on_grid(const CompoundPhaseType& z_law,
                                           const std::vector<double>& grid);

// -alpha_Z exp(z T_Z) T_Z e.
double pdf(const CompoundPhaseType& z_law, double z);
// alpha_Z exp(z T_Z) e.
double cdf_survival(const CompoundPhaseType& z_law, double z);

// p! alpha_Z (-T_Z)^-p e; p = 1 is the MTTF.
double raw_moment(const CompoundPhaseType& z_law, int p);
double scv(const CompoundPhaseType& z_law);

}  // namespace cknb

#endif  // CKNB_CONTINUOUS_PH_HPP_
