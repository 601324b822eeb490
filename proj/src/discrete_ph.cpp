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

#include "cknb/discrete_ph.hpp"

#include <cmath>

#include "cknb/error.hpp"

namespace cknb {

namespace {

constexpr long kMaxSeriesTerms = 10'000'000;

void require_positive(int value, const char* what) {
  if (value < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(what) + " must be >= 1");
  }
}

// Solves (I - P) x = b with P upper triangular.
Eigen::VectorXd solve_resolvent(const SparseRowMatrix& P,
                                const Eigen::VectorXd& b) {
  const Eigen::Index n = P.rows();
  Eigen::VectorXd x = b;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double diag = 1.0;
    double acc = x(i);
    for (SparseRowMatrix::InnerIterator it(P, i); it; ++it) {
      if (it.col() == i) {
        diag -= it.value();
      } else if (it.col() > i) {
        acc += it.value() * x(it.col());
      } else {
        throw Error(ErrorKind::kInvalidArgument,
                    "subtransition matrix is not upper triangular");
      }
    }
    if (!(diag > 0.0)) {
      throw Error(ErrorKind::kSingularSystem,
                  "I - P is singular (a state never leaves itself)");
    }
    x(i) = acc / diag;
  }
  return x;
}

double factorial(int p) {
  double out = 1.0;
  for (int i = 2; i <= p; ++i) out *= i;
  return out;
}

}  // namespace

DiscretePhaseType sntf_distribution(const ConsolidatedChain& chain) {
  DiscretePhaseType dist;
  dist.alpha = Eigen::RowVectorXd::Zero(chain.size());
  dist.alpha(0) = 1.0;
  dist.P = chain.P;
  dist.exit = chain.absorb;
  return dist;
}

DiscretePhaseType sntf_distribution(const SystemConfig& config) {
  config.validate();
  return sntf_distribution(
      build_consolidated(config.n, config.k, config.bc, config.r));
}

double pmf_matrix(const DiscretePhaseType& dist, int m) {
  require_positive(m, "m");
  return pmf_matrix_series(dist, m).back();
}

std::vector<double> pmf_matrix_series(const DiscretePhaseType& dist,
                                      int m_max) {
  require_positive(m_max, "m_max");
  std::vector<double> out;
  out.reserve(m_max);
  Eigen::RowVectorXd v = dist.alpha;
  for (int m = 1; m <= m_max; ++m) {
    out.push_back(v.dot(dist.exit));
    v = v * dist.P;
  }
  return out;
}

double pmf_direct(const StateSpace& space, double r, int m) {
  require_positive(m, "m");
  const int n = space.n;
  const double now = std::pow(r, m);
  const double before = std::pow(r, m - 1);
  double total = 0.0;
  for (int c1 = 0; c1 <= n; ++c1) {
    const auto count = space.count_by_operating[c1];
    if (count == 0) continue;
    const int c2 = n - c1;
    // pow(0, 0) == 1 keeps the m = 1 term consistent with alpha P^0 e.
    // P{M > m-1} - P{M > m}, written per operating count.
    total += static_cast<double>(count) * std::pow(before, c1) *
             (std::pow(1.0 - before, c2) -
              std::pow(r, c1) * std::pow(1.0 - now, c2));
  }
  return total;
}

double pmf_direct(const SystemConfig& config, int m) {
  config.validate();
  return pmf_direct(build_state_space(config.n, config.k, config.bc),
                    config.r, m);
}

double survival(const DiscretePhaseType& dist, int m) {
  if (m < 0) throw Error(ErrorKind::kInvalidArgument, "m must be >= 0");
  Eigen::RowVectorXd v = dist.alpha;
  for (int i = 0; i < m; ++i) v = v * dist.P;
  return v.sum();
}

double survival_direct(const StateSpace& space, double r, int m) {
  if (m < 0) throw Error(ErrorKind::kInvalidArgument, "m must be >= 0");
  const double now = std::pow(r, m);
  double total = 0.0;
  for (int c1 = 0; c1 <= space.n; ++c1) {
    const auto count = space.count_by_operating[c1];
    if (count == 0) continue;
    total += static_cast<double>(count) * std::pow(now, c1) *
             std::pow(1.0 - now, space.n - c1);
  }
  return total;
}

double mean_closed(const DiscretePhaseType& dist) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(dist.phases());
  return dist.alpha.dot(solve_resolvent(dist.P, ones));
}

double factorial_moment(const DiscretePhaseType& dist, int p) {
  require_positive(p, "p");
  Eigen::VectorXd y = Eigen::VectorXd::Ones(dist.phases());
  for (int i = 1; i < p; ++i) y = dist.P * y;
  for (int i = 0; i < p; ++i) y = solve_resolvent(dist.P, y);
  return factorial(p) * dist.alpha.dot(y);
}

double raw_moment_closed(const DiscretePhaseType& dist, int p) {
  require_positive(p, "p");
  // stirling[j] = S(p, j), built row by row.
  std::vector<double> stirling(p + 1, 0.0);
  stirling[0] = 1.0;
  for (int row = 1; row <= p; ++row) {
    for (int j = row; j >= 1; --j) {
      stirling[j] = j * stirling[j] + stirling[j - 1];
    }
    stirling[0] = 0.0;
  }
  double total = 0.0;
  for (int j = 1; j <= p; ++j) {
    if (stirling[j] != 0.0) total += stirling[j] * factorial_moment(dist, j);
  }
  return total;
}

double raw_moment_series(const ConsolidatedChain& chain, int p, double tol) {
  require_positive(p, "p");
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "tol must be positive");
  }
  const double rho = 1.0 - chain.absorb.minCoeff();
  if (!(rho < 1.0)) {
    throw Error(ErrorKind::kSingularSystem,
                "a transient state has zero absorption probability");
  }
  const double tail_scale = 1.0 / (1.0 - rho);
  const double tail_shift = rho / (1.0 - rho);

  double sum = 0.0;
  for (long m = 1; m <= kMaxSeriesTerms; ++m) {
    const int mi = static_cast<int>(m);
    sum += std::pow(static_cast<double>(m), p) *
           pmf_direct(chain.space, chain.r, mi);
    const double left = survival_direct(chain.space, chain.r, mi);
    const double bound =
        left * tail_scale * std::pow(static_cast<double>(m) + tail_shift, p);
    if (bound < tol * sum) return sum;
  }
  throw Error(ErrorKind::kNonConvergence,
              "moment series did not converge within 1e7 terms");
}

}  // namespace cknb
