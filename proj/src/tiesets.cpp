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

#include "cknb/tiesets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "cknb/error.hpp"

namespace cknb {

namespace {

// Next mask with the same popcount (Gosper's hack).
std::uint64_t next_combination(std::uint64_t x) {
  const std::uint64_t c = x & (~x + 1);
  const std::uint64_t r = x + c;
  return (((r ^ x) >> 2) / c) | r;
}

void require_table_size(int n) {
  if (n > kMaxTableUnits) {
    throw Error(ErrorKind::kCapacityExceeded,
                "state table limited to n <= " +
                    std::to_string(kMaxTableUnits));
  }
}

}  // namespace

int TieSet::size() const { return std::popcount(mask); }

std::vector<int> TieSet::members() const { return as_state().members(); }

TieSetCollection enumerate_min_tiesets(int n, int k, BalanceCondition bc) {
  SystemConfig{n, k, 0.5, bc, std::nullopt}.validate();

  TieSetCollection out{n, k, bc, {}};
  const bool use_table = n <= kMaxTableUnits;
  // contains[m] != 0 iff m contains an already found tie-set; filled band
  // by band so every (c-1)-subset is final before band c is scanned.
  std::vector<std::uint8_t> contains;
  if (use_table) contains.assign(std::size_t{1} << n, 0);

  const std::uint64_t limit = std::uint64_t{1} << n;
  for (int c = k; c <= n; ++c) {
    for (std::uint64_t m = (std::uint64_t{1} << c) - 1; m < limit;
         m = next_combination(m)) {
      const auto mask = static_cast<StateMask>(m);
      bool dominated = false;
      if (use_table) {
        for (StateMask rest = mask; rest != 0; rest &= rest - 1) {
          if (contains[mask & ~(rest & (~rest + 1))]) {
            dominated = true;
            break;
          }
        }
      } else {
        dominated = std::any_of(
            out.tiesets.begin(), out.tiesets.end(),
            [mask](const TieSet& t) { return (t.mask & ~mask) == 0; });
      }
      if (!dominated && is_balanced_mask(mask, n, bc)) {
        out.tiesets.push_back(TieSet{n, mask});
        dominated = true;
      }
      if (use_table && dominated) contains[mask] = 1;
    }
  }

  if (out.tiesets.empty()) {
    throw Error(ErrorKind::kNoTieSets,
                "no balanced set of at least k=" + std::to_string(k) +
                    " units exists for n=" + std::to_string(n) + " under " +
                    to_string(bc));
  }

  std::sort(out.tiesets.begin(), out.tiesets.end(),
            [](const TieSet& a, const TieSet& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a.members() < b.members();
            });
  return out;
}

bool is_nonfailed(const SystemState& state, const TieSetCollection& tiesets) {
  if (state.n() != tiesets.n) {
    throw Error(ErrorKind::kInvalidArgument,
                "state and tie-set collection disagree on n");
  }
  const StateMask mask = state.mask();
  return std::any_of(
      tiesets.tiesets.begin(), tiesets.tiesets.end(),
      [mask](const TieSet& t) { return (t.mask & ~mask) == 0; });
}

int structure_function(const SystemState& state,
                       const TieSetCollection& tiesets) {
  if (state.n() != tiesets.n) {
    throw Error(ErrorKind::kInvalidArgument,
                "state and tie-set collection disagree on n");
  }
  int all_broken = 1;
  for (const TieSet& t : tiesets.tiesets) {
    int path = 1;
    for (int i : t.members()) path *= state.operating(i) ? 1 : 0;
    all_broken *= 1 - path;
  }
  return 1 - all_broken;
}

double system_reliability_product(const TieSetCollection& tiesets, double r) {
  double all_broken = 1.0;
  for (const TieSet& t : tiesets.tiesets) {
    all_broken *= 1.0 - std::pow(r, t.size());
  }
  return 1.0 - all_broken;
}

double system_reliability_exact(int n, const TieSetCollection& tiesets,
                                double r) {
  if (n > 20) {
    throw Error(ErrorKind::kCapacityExceeded,
                "exact reliability enumeration limited to n <= 20");
  }
  if (n != tiesets.n) {
    throw Error(ErrorKind::kInvalidArgument,
                "n disagrees with the tie-set collection");
  }
  const auto table = nonfailed_table(tiesets);
  // Probability weights by number of operating units.
  std::vector<double> weight(n + 1);
  for (int c = 0; c <= n; ++c) {
    weight[c] = std::pow(r, c) * std::pow(1.0 - r, n - c);
  }
  double total = 0.0;
  for (std::size_t m = 0; m < table.size(); ++m) {
    if (table[m]) total += weight[std::popcount(m)];
  }
  return total;
}

std::vector<std::uint8_t> nonfailed_table(const TieSetCollection& tiesets) {
  const int n = tiesets.n;
  require_table_size(n);
  std::vector<std::uint8_t> table(std::size_t{1} << n, 0);
  for (const TieSet& t : tiesets.tiesets) table[t.mask] = 1;
  // Superset closure, one unit at a time.
  for (int b = 0; b < n; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    for (std::size_t m = 0; m < table.size(); ++m) {
      if ((m & bit) && table[m ^ bit]) table[m] = 1;
    }
  }
  return table;
}

}  // namespace cknb
