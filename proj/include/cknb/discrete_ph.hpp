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

#ifndef CKNB_DISCRETE_PH_HPP_
#define CKNB_DISCRETE_PH_HPP_

#include <vector>

#include <Eigen/Dense>

#include "cknb/markov_chain.hpp"

namespace cknb {

// Shock numbers to failure M ~ PH_d(alpha, P) over the consolidated chain.
struct DiscretePhaseType {
  Eigen::RowVectorXd alpha;
  SparseRowMatrix P;
  Eigen::VectorXd exit;  // e - P e

  Eigen::Index phases() const { return alpha.size(); }
};

DiscretePhaseType sntf_distribution(const ConsolidatedChain& chain);
DiscretePhaseType sntf_distribution(const SystemConfig& config);

// alpha P^(m-1) (e - P e).
double pmf_matrix(const DiscretePhaseType& dist, int m);
// pmf_matrix for m = 1..m_max in one pass.
std::vector<double> pmf_matrix_series(const DiscretePhaseType& dist,
                                      int m_max);

// Direct summation over nonfailed states using only the operating-unit
// counts relative to the all-ones state; no matrix powers.
double pmf_direct(const StateSpace& space, double r, int m);
double pmf_direct(const SystemConfig& config, int m);

// P{M > m} = alpha P^m e.
double survival(const DiscretePhaseType& dist, int m);
// Same via the closed-form m-step probabilities from the all-ones state.
double survival_direct(const StateSpace& space, double r, int m);

// alpha (I - P)^-1 e by back-substitution.
double mean_closed(const DiscretePhaseType& dist);

// E[M (M-1) ... (M-p+1)] = p! alpha (I - P)^-p P^(p-1) e.
double factorial_moment(const DiscretePhaseType& dist, int p);

// E[M^p] assembled from factorial moments with Stirling numbers of the
// second kind.
double raw_moment_closed(const DiscretePhaseType& dist, int p);

// sum_m m^p P{M = m} with pmf_direct inside. The series stops once the
// geometric tail bound built from rho = max row sum of P drops below
// tol times the running sum.
double raw_moment_series(const ConsolidatedChain& chain, int p, double tol);

}  // namespace cknb

#endif  // CKNB_DISCRETE_PH_HPP_
