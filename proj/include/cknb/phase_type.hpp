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

#ifndef CKNB_PHASE_TYPE_HPP_
#define CKNB_PHASE_TYPE_HPP_

#include <string>
#include <variant>

#include <Eigen/Dense>

namespace cknb {

// Continuous phase-type law PH(alpha, T) with K = alpha.size() phases.
// Invariants are checked by validate(); constructors do not normalize.
struct ContinuousPhaseType {
  Eigen::RowVectorXd alpha;
  Eigen::MatrixXd T;

  Eigen::Index phases() const { return alpha.size(); }
  // Exit rate vector -T e.
  Eigen::VectorXd exit_rates() const;
  // Throws Error(kInvalidPhaseType) on a malformed representation.
  void validate() const;
};

enum class ShockPreset { kErlang, kExponential, kHyperexponential };

const char* to_string(ShockPreset preset);
ShockPreset parse_shock_preset(const std::string& label);

// Inter-shock time law: one of the unit-mean presets or a user-supplied PH.
using InterShockSpec = std::variant<ShockPreset, ContinuousPhaseType>;

ContinuousPhaseType ph_from_preset(ShockPreset preset);
ContinuousPhaseType resolve(const InterShockSpec& spec);
std::string describe(const InterShockSpec& spec);

}  // namespace cknb

#endif  // CKNB_PHASE_TYPE_HPP_
