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

#include "cknb/markov_chain.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "cknb/error.hpp"

namespace cknb {

namespace {

void require_same_n(const SystemState& a, const SystemState& b) {
  if (a.n() != b.n()) {
    throw Error(ErrorKind::kInvalidArgument, "states disagree on n");
  }
}

void require_open_unit(double r) {
  if (!(r > 0.0 && r < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "r must lie strictly in (0, 1)");
  }
}

}  // namespace

TransitionCounts transition_counts(const SystemState& from,
                                   const SystemState& to) {
  require_same_n(from, to);
  const StateMask a = from.mask();
  const StateMask b = to.mask();
  TransitionCounts c;
  c.c1 = std::popcount(a & b);
  c.c2 = std::popcount(a & ~b);
  c.c3 = std::popcount(~a & b);
  c.c4 = from.n() - c.c1 - c.c2 - c.c3;
  return c;
}

double one_step_prob(const SystemState& from, const SystemState& to,
                     double r) {
  return mstep_prob(from, to, 1, r);
}

double mstep_prob(const SystemState& from, const SystemState& to, int m,
                  double r) {
  if (m < 1) throw Error(ErrorKind::kInvalidArgument, "m must be >= 1");
  const TransitionCounts c = transition_counts(from, to);
  if (c.c3 > 0) return 0.0;
  const double survive = std::pow(r, m);
  return std::pow(survive, c.c1) * std::pow(1.0 - survive, c.c2);
}

StateSpace build_state_space(int n, int k, BalanceCondition bc) {
  StateSpace space;
  space.n = n;
  space.k = k;
  space.bc = bc;
  space.tiesets = enumerate_min_tiesets(n, k, bc);
  if (n > kMaxTableUnits) {
    throw Error(ErrorKind::kCapacityExceeded,
                "consolidated chain limited to n <= " +
                    std::to_string(kMaxTableUnits));
  }
  const auto table = nonfailed_table(space.tiesets);
  space.count_by_operating.assign(n + 1, 0);
  for (std::size_t m = table.size(); m-- > 0;) {
    if (!table[m]) continue;
    const auto mask = static_cast<StateMask>(m);
    space.masks.push_back(mask);
    space.operating.push_back(std::popcount(mask));
    ++space.count_by_operating[std::popcount(mask)];
  }
  return space;
}

std::vector<SystemState> nonfailed_states(int n, int k, BalanceCondition bc) {
  const StateSpace space = build_state_space(n, k, bc);
  std::vector<SystemState> out;
  out.reserve(space.size());
  for (std::size_t j = 0; j < space.size(); ++j) out.push_back(space.state(j));
  return out;
}

ConsolidatedChain build_consolidated(const StateSpace& space, double r) {
  require_open_unit(r);
  const int n = space.n;
  const auto states = static_cast<Eigen::Index>(space.size());

  std::vector<std::int32_t> position(std::size_t{1} << n, -1);
  for (Eigen::Index j = 0; j < states; ++j) {
    position[space.masks[j]] = static_cast<std::int32_t>(j);
  }
  std::vector<double> survive_pow(n + 1);
  std::vector<double> fail_pow(n + 1);
  for (int c = 0; c <= n; ++c) {
    survive_pow[c] = std::pow(r, c);
    fail_pow[c] = std::pow(1.0 - r, c);
  }

  // Row a holds every nonfailed submask of a; descending submask order is
  // ascending column order.
  std::vector<Eigen::Index> row_nnz(states, 0);
  for (Eigen::Index a = 0; a < states; ++a) {
    const StateMask from = space.masks[a];
    for (StateMask sub = from;; sub = (sub - 1) & from) {
      if (position[sub] >= 0) ++row_nnz[a];
      if (sub == 0) break;
    }
  }

  ConsolidatedChain chain;
  chain.space = space;
  chain.r = r;
  chain.P.resize(states, states);
  chain.P.reserve(row_nnz);
  for (Eigen::Index a = 0; a < states; ++a) {
    const StateMask from = space.masks[a];
    const int alive = std::popcount(from);
    for (StateMask sub = from;; sub = (sub - 1) & from) {
      if (position[sub] >= 0) {
        const int kept = std::popcount(sub);
        chain.P.insert(a, position[sub]) =
            survive_pow[kept] * fail_pow[alive - kept];
      }
      if (sub == 0) break;
    }
  }
  chain.P.makeCompressed();
  chain.absorb = Eigen::VectorXd::Ones(states) -
                 chain.P * Eigen::VectorXd::Ones(states);
  return chain;
}

ConsolidatedChain build_consolidated(int n, int k, BalanceCondition bc,
                                     double r) {
  require_open_unit(r);
  return build_consolidated(build_state_space(n, k, bc), r);
}

Eigen::MatrixXd ConsolidatedChain::augmented_dense() const {
  const Eigen::Index s = size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s + 1, s + 1);
  out.topLeftCorner(s, s) = Eigen::MatrixXd(P);
  out.topRightCorner(s, 1) = absorb;
  out(s, s) = 1.0;
  return out;
}

void write_augmented_csv(const ConsolidatedChain& chain, std::ostream& out) {
  const Eigen::MatrixXd dense = chain.augmented_dense();
  const Eigen::Index s = chain.size();
  auto label = [&](Eigen::Index j) {
    return j < s ? chain.space.state(j).to_tuple() : std::string("failed");
  };
  out << "state";
  for (Eigen::Index j = 0; j <= s; ++j) out << ",\"" << label(j) << '"';
  out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i <= s; ++i) {
    out << '"' << label(i) << '"';
    for (Eigen::Index j = 0; j <= s; ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", dense(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

std::vector<double> absorbed_by_step(const ConsolidatedChain& chain,
                                     int m_max) {
  std::vector<double> out;
  out.reserve(m_max);
  Eigen::RowVectorXd dist = Eigen::RowVectorXd::Zero(chain.size());
  dist(0) = 1.0;
  for (int m = 1; m <= m_max; ++m) {
    dist = dist * chain.P;
    out.push_back(1.0 - dist.sum());
  }
  return out;
}

std::vector<double> absorbed_by_step_full(int n, int k, BalanceCondition bc,
                                          double r, int m_max) {
  require_open_unit(r);
  if (n > 20) {
    throw Error(ErrorKind::kCapacityExceeded,
                "full-chain propagation limited to n <= 20");
  }
  const auto tiesets = enumerate_min_tiesets(n, k, bc);
  const auto table = nonfailed_table(tiesets);
  std::vector<double> dist(std::size_t{1} << n, 0.0);
  dist.back() = 1.0;
  std::vector<double> out;
  out.reserve(m_max);
  for (int m = 1; m <= m_max; ++m) {
    // A shock acts independently on each unit: apply the 2x2 unit kernel
    // along every bit.
    for (int b = 0; b < n; ++b) {
      const std::size_t bit = std::size_t{1} << b;
      for (std::size_t s = 0; s < dist.size(); ++s) {
        if (s & bit) {
          dist[s ^ bit] += (1.0 - r) * dist[s];
          dist[s] *= r;
        }
      }
    }
    double alive = 0.0;
    for (std::size_t s = 0; s < dist.size(); ++s) {
      if (table[s]) alive += dist[s];
    }
    out.push_back(1.0 - alive);
  }
  return out;
}

}  // namespace cknb
