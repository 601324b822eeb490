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

#ifndef CKNB_MARKOV_CHAIN_HPP_
#define CKNB_MARKOV_CHAIN_HPP_

#include <cstdint>
#include <ostream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "cknb/system_model.hpp"
#include "cknb/tiesets.hpp"

namespace cknb {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Unit-pair tallies between two states: c1 = (1,1), c2 = (1,0), c3 = (0,1),
// c4 = (0,0).
struct TransitionCounts {
  int c1 = 0;
  int c2 = 0;
  int c3 = 0;
  int c4 = 0;

  friend bool operator==(const TransitionCounts&,
                         const TransitionCounts&) = default;
};

TransitionCounts transition_counts(const SystemState& from,
                                   const SystemState& to);

// Probability of moving from `from` to `to` across one shock.
double one_step_prob(const SystemState& from, const SystemState& to, double r);

// Closed-form m-step transition probability on the full state space.
double mstep_prob(const SystemState& from, const SystemState& to, int m,
                  double r);

// The nonfailed states and their ordering, independent of r. Reused across
// r sweeps.
struct StateSpace {
  int n = 0;
  int k = 0;
  BalanceCondition bc = BalanceCondition::kBC3;
  TieSetCollection tiesets;
  // Ascending canonical index (descending mask); masks[0] is all-ones.
  std::vector<StateMask> masks;
  // operating[j] = c1(x_1, masks[j]); c2 = n - operating[j].
  std::vector<int> operating;
  // count_by_operating[c] = number of nonfailed states with c operating units.
  std::vector<std::int64_t> count_by_operating;

  std::size_t size() const { return masks.size(); }
  SystemState state(std::size_t j) const { return SystemState(n, masks[j]); }
};

StateSpace build_state_space(int n, int k, BalanceCondition bc);

std::vector<SystemState> nonfailed_states(int n, int k, BalanceCondition bc);

// Transient part of the consolidated chain. P is upper triangular in the
// state order of `space` because failed units never recover.
struct ConsolidatedChain {
  StateSpace space;
  double r = 0.0;
  SparseRowMatrix P;
  // One-step absorption probabilities e - P e.
  Eigen::VectorXd absorb;

  Eigen::Index size() const { return P.rows(); }
  // P with the absorbing column and the (0, ..., 0, 1) row appended.
  Eigen::MatrixXd augmented_dense() const;
};

ConsolidatedChain build_consolidated(const StateSpace& space, double r);
ConsolidatedChain build_consolidated(int n, int k, BalanceCondition bc,
                                     double r);

// CSV dump of the augmented matrix with state-tuple headers.
void write_augmented_csv(const ConsolidatedChain& chain, std::ostream& out);

// P{absorbed by shock m}, m = 1..m_max, from the consolidated chain.
std::vector<double> absorbed_by_step(const ConsolidatedChain& chain,
                                     int m_max);

// Same quantity by propagating the distribution over all 2^n states one
// shock at a time, unit by unit; no consolidation involved. n <= 20.
std::vector<double> absorbed_by_step_full(int n, int k, BalanceCondition bc,
                                          double r, int m_max);

}  // namespace cknb

#endif  // CKNB_MARKOV_CHAIN_HPP_
