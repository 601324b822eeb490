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

#ifndef CKNB_TIESETS_HPP_
#define CKNB_TIESETS_HPP_

#include <cstdint>
#include <vector>

#include "cknb/system_model.hpp"

namespace cknb {

// A minimum tie-set: an inclusion-minimal balanced set of at least k units.
struct TieSet {
  int n = 0;
  StateMask mask = 0;

  int size() const;
  std::vector<int> members() const;
  SystemState as_state() const { return SystemState(n, mask); }

  friend bool operator==(const TieSet&, const TieSet&) = default;
};

// Sorted by (cardinality, lexicographic member list).
struct TieSetCollection {
  int n = 0;
  int k = 0;
  BalanceCondition bc = BalanceCondition::kBC3;
  std::vector<TieSet> tiesets;

  std::size_t size() const { return tiesets.size(); }
  bool empty() const { return tiesets.empty(); }
};

// Throws Error(kNoTieSets) when no balanced set of >= k units exists.
TieSetCollection enumerate_min_tiesets(int n, int k, BalanceCondition bc);

bool is_nonfailed(const SystemState& state, const TieSetCollection& tiesets);

// 1 - prod_T (1 - prod_{i in T} x_i).
int structure_function(const SystemState& state,
                       const TieSetCollection& tiesets);

// 1 - prod_T (1 - r^|T|); treats tie-set events as independent.
double system_reliability_product(const TieSetCollection& tiesets, double r);

// E[phi(X)] by summing over all 2^n states. Requires n <= 20.
double system_reliability_exact(int n, const TieSetCollection& tiesets,
                                double r);

inline constexpr int kMaxTableUnits = 24;

// Byte per mask, nonzero iff the mask contains a tie-set. Requires
// n <= kMaxTableUnits.
std::vector<std::uint8_t> nonfailed_table(const TieSetCollection& tiesets);

}  // namespace cknb

#endif  // CKNB_TIESETS_HPP_
