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

#include "cknb/system_model.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "cknb/error.hpp"

namespace cknb {

namespace {

void require_unit_count(int n) {
  if (n < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "unit count must be positive, got " + std::to_string(n));
  }
  if (n > kMaxUnits) {
    throw Error(ErrorKind::kCapacityExceeded,
                "unit count must lie in [1, " + std::to_string(kMaxUnits) +
                    "], got " + std::to_string(n));
  }
}

StateMask low_bits(int n) {
  return n == 32 ? ~StateMask{0} : ((StateMask{1} << n) - 1);
}

// Re-express a state mask with unit u+1 at bit u (position order).
StateMask to_positions(StateMask mask, int n) {
  StateMask out = 0;
  for (int u = 0; u < n; ++u) {
    if (mask & (StateMask{1} << (n - 1 - u))) out |= StateMask{1} << u;
  }
  return out;
}

StateMask from_positions(StateMask pos, int n) { return to_positions(pos, n); }

StateMask rotate_positions(StateMask pos, int n, int s) {
  s = ((s % n) + n) % n;
  if (s == 0) return pos;
  return ((pos << s) | (pos >> (n - s))) & low_bits(n);
}

// Reflection across the axis at angle pi*j/n maps position u to (j-u) mod n.
StateMask reflect_positions(StateMask pos, int n, int j) {
  StateMask out = 0;
  for (int u = 0; u < n; ++u) {
    if (pos & (StateMask{1} << u)) {
      const int v = ((j - u) % n + n) % n;
      out |= StateMask{1} << v;
    }
  }
  return out;
}

}  // namespace

SystemState::SystemState(int n, StateMask mask) : n_(n), mask_(mask) {
  require_unit_count(n);
  if (mask & ~low_bits(n)) {
    throw Error(ErrorKind::kInvalidArgument, "state mask has bits beyond n");
  }
}

SystemState::SystemState(std::initializer_list<int> statuses)
    : SystemState(std::vector<int>(statuses)) {}

SystemState::SystemState(const std::vector<int>& statuses)
    : n_(static_cast<int>(statuses.size())), mask_(0) {
  require_unit_count(n_);
  for (int i = 0; i < n_; ++i) {
    if (statuses[i] != 0) mask_ |= StateMask{1} << (n_ - 1 - i);
  }
}

SystemState SystemState::all_operating(int n) {
  require_unit_count(n);
  return SystemState(n, low_bits(n));
}

SystemState SystemState::from_index(int n, std::uint64_t index) {
  require_unit_count(n);
  const std::uint64_t total = std::uint64_t{1} << n;
  if (index < 1 || index > total) {
    throw Error(ErrorKind::kInvalidArgument, "state index out of range");
  }
  return SystemState(n, static_cast<StateMask>(total - index));
}

SystemState SystemState::from_members(int n, const std::vector<int>& units) {
  require_unit_count(n);
  StateMask mask = 0;
  for (int i : units) {
    if (i < 1 || i > n) {
      throw Error(ErrorKind::kInvalidArgument, "unit index out of range");
    }
    mask |= StateMask{1} << (n - i);
  }
  return SystemState(n, mask);
}

bool SystemState::operating(int unit) const {
  if (unit < 1 || unit > n_) {
    throw Error(ErrorKind::kInvalidArgument, "unit index out of range");
  }
  return (mask_ >> (n_ - unit)) & 1U;
}

int SystemState::operating_count() const { return std::popcount(mask_); }

std::vector<int> SystemState::members() const {
  std::vector<int> out;
  for (int i = 1; i <= n_; ++i) {
    if (operating(i)) out.push_back(i);
  }
  return out;
}

SystemState SystemState::rotated(int s) const {
  return SystemState(
      n_, from_positions(rotate_positions(to_positions(mask_, n_), n_, s), n_));
}

SystemState SystemState::reflected() const {
  return SystemState(
      n_, from_positions(reflect_positions(to_positions(mask_, n_), n_, 0), n_));
}

bool SystemState::subset_of(const SystemState& other) const {
  return n_ == other.n_ && (mask_ & ~other.mask_) == 0;
}

std::string SystemState::to_tuple() const {
  std::string out = "(";
  for (int i = 1; i <= n_; ++i) {
    if (i > 1) out += ',';
    out += operating(i) ? '1' : '0';
  }
  return out + ")";
}

const char* to_string(BalanceCondition bc) {
  switch (bc) {
    case BalanceCondition::kBC1: return "BC1";
    case BalanceCondition::kBC2: return "BC2";
    case BalanceCondition::kBC3: return "BC3";
  }
  return "?";
}

BalanceCondition parse_balance_condition(const std::string& label) {
  if (label == "BC1") return BalanceCondition::kBC1;
  if (label == "BC2") return BalanceCondition::kBC2;
  if (label == "BC3") return BalanceCondition::kBC3;
  throw Error(ErrorKind::kInvalidArgument,
              "unknown balance condition '" + label + "'");
}

void require_supported(int n, BalanceCondition bc) {
  if (bc == BalanceCondition::kBC1 && n % 2 != 0) {
    throw Error(ErrorKind::kOddNUnsupported,
                "BC1 needs a perpendicular pair of dihedral axes, which "
                "exists only for even n (got n=" + std::to_string(n) + ")");
  }
}

void SystemConfig::validate() const {
  require_unit_count(n);
  if (k < 2 || k > n) {
    throw Error(ErrorKind::kInvalidArgument,
                "k must satisfy 2 <= k <= n (got k=" + std::to_string(k) +
                    ", n=" + std::to_string(n) + ")");
  }
  if (!(r > 0.0 && r < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "unit reliability r must lie strictly inside (0, 1)");
  }
  require_supported(n, bc);
  if (shock) resolve(*shock).validate();
}

double unit_angle(int unit, int n) {
  require_unit_count(n);
  if (unit < 1 || unit > n) {
    throw Error(ErrorKind::kInvalidArgument, "unit index out of range");
  }
  return 2.0 * std::numbers::pi * (unit - 1) / n;
}

bool is_balanced_mask(StateMask mask, int n, BalanceCondition bc) {
  require_supported(n, bc);
  if (mask == 0) return false;
  const StateMask pos = to_positions(mask, n);
  switch (bc) {
    case BalanceCondition::kBC3: {
      double x = 0.0;
      double y = 0.0;
      for (int u = 0; u < n; ++u) {
        if (pos & (StateMask{1} << u)) {
          const double theta = 2.0 * std::numbers::pi * u / n;
          x += std::cos(theta);
          y += std::sin(theta);
        }
      }
      return std::hypot(x, y) <= 1e-9 * n;
    }
    case BalanceCondition::kBC2: {
      for (int s = 1; s < n; ++s) {
        if (rotate_positions(pos, n, s) == pos) return true;
      }
      return false;
    }
    case BalanceCondition::kBC1: {
      const int half = n / 2;
      for (int j = 0; j < n; ++j) {
        if (reflect_positions(pos, n, j) == pos &&
            reflect_positions(pos, n, (j + half) % n) == pos) {
          return true;
        }
      }
      return false;
    }
  }
  return false;
}

bool is_balanced_bc1(const SystemState& state) {
  return is_balanced_mask(state.mask(), state.n(), BalanceCondition::kBC1);
}

bool is_balanced_bc2(const SystemState& state) {
  return is_balanced_mask(state.mask(), state.n(), BalanceCondition::kBC2);
}

bool is_balanced_bc3(const SystemState& state) {
  return is_balanced_mask(state.mask(), state.n(), BalanceCondition::kBC3);
}

bool is_balanced(const SystemState& state, BalanceCondition bc) {
  return is_balanced_mask(state.mask(), state.n(), bc);
}

}  // namespace cknb
