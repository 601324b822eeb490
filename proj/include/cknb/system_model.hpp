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

#ifndef CKNB_SYSTEM_MODEL_HPP_
#define CKNB_SYSTEM_MODEL_HPP_

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "cknb/phase_type.hpp"

namespace cknb {

inline constexpr int kMaxUnits = 30;

using StateMask = std::uint32_t;

// Status of the n units on the circle. Unit i (1-based) is stored at bit
// n - i so the raw mask equals sum_i x_i 2^(n-i); the all-ones state has
// canonical index 1 and the all-zeros state has index 2^n.
class SystemState {
 public:
  SystemState(int n, StateMask mask);
  // One entry per unit, unit 1 first; nonzero means operating.
  SystemState(std::initializer_list<int> statuses);
  explicit SystemState(const std::vector<int>& statuses);

  static SystemState all_operating(int n);
  static SystemState from_index(int n, std::uint64_t index);
  static SystemState from_members(int n, const std::vector<int>& units);

  int n() const { return n_; }
  StateMask mask() const { return mask_; }
  std::uint64_t index() const { return (std::uint64_t{1} << n_) - mask_; }

  bool operating(int unit) const;
  int operating_count() const;
  // 1-based indices of operating units, ascending.
  std::vector<int> members() const;
  // Rotate every unit s positions forward (unit i moves to unit i + s).
  SystemState rotated(int s) const;
  // Mirror image i -> n + 2 - i (mod n), fixing unit 1.
  SystemState reflected() const;
  // Componentwise <=, i.e. this operating set is a subset of other's.
  bool subset_of(const SystemState& other) const;

  std::string to_tuple() const;  // "(1,0,1,0)"

  friend bool operator==(const SystemState&, const SystemState&) = default;

 private:
  int n_;
  StateMask mask_;
};

enum class BalanceCondition { kBC1, kBC2, kBC3 };

const char* to_string(BalanceCondition bc);
BalanceCondition parse_balance_condition(const std::string& label);

struct SystemConfig {
  int n = 0;
  int k = 0;
  double r = 0.0;
  BalanceCondition bc = BalanceCondition::kBC3;
  std::optional<InterShockSpec> shock;

  double unit_failure_prob() const { return 1.0 - r; }
  // Throws Error(kInvalidArgument) or Error(kOddNUnsupported).
  void validate() const;
};

// Angular position of unit i; unit 1 sits at angle 0.
double unit_angle(int unit, int n);

bool is_balanced_bc1(const SystemState& state);
bool is_balanced_bc2(const SystemState& state);
bool is_balanced_bc3(const SystemState& state);
bool is_balanced(const SystemState& state, BalanceCondition bc);

// Mask-level predicates used by the enumerators.
bool is_balanced_mask(StateMask mask, int n, BalanceCondition bc);

void require_supported(int n, BalanceCondition bc);

}  // namespace cknb

#endif  // CKNB_SYSTEM_MODEL_HPP_
