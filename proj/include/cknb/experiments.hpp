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

#ifndef CKNB_EXPERIMENTS_HPP_
#define CKNB_EXPERIMENTS_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cknb/phase_type.hpp"
#include "cknb/system_model.hpp"

namespace cknb {

// Process exit codes shared by the CLI and the config loader.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,
  kExitConfigError = 2,
  kExitInfeasible = 3,
  kExitNumericalFailure = 4,
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int exit_code, const std::string& field, const std::string& why)
      : std::runtime_error(field.empty() ? why : field + ": " + why),
        exit_code_(exit_code),
        field_(field) {}

  int exit_code() const { return exit_code_; }
  const std::string& field() const { return field_; }

 private:
  int exit_code_;
  std::string field_;
};

// Parameter lists for the sweep commands. An empty k list means every k in
// [2, n-1] for each n.
struct SweepGrid {
  std::vector<int> n_values;
  std::vector<int> k_values;
  std::vector<double> r_values;
  std::vector<BalanceCondition> bcs;
  std::vector<ShockPreset> presets;
};

struct ExperimentSpec {
  std::optional<SystemConfig> system;
  SweepGrid grid;
  std::string out_path;
  int m_max = 50;
  std::optional<double> z_max;
  int z_points = 201;
  int p_max = 4;
  double tol = 1e-12;
  std::int64_t reps = 100'000;
  std::uint64_t seed = 20240917;
  int threads = 1;
  bool pmf_matrix = false;
  bool simulate_ttf = false;
};

// Parses and validates a JSON document. Throws ConfigError with exit code
// 2 on schema violations and 3 when the configured system has no tie-sets.
ExperimentSpec parse_config(const std::string& json_text);
ExperimentSpec load_config(const std::string& path);

// Pretty JSON echo of the fully defaulted spec.
std::string echo_config(const ExperimentSpec& spec);

std::vector<double> default_r_grid();

// 12 significant digits, '.' decimal separator.
std::string format_number(double value);

// Command drivers. Each writes its table to `out` and throws cknb::Error or
// ConfigError on failure.
void cmd_tiesets(const ExperimentSpec& spec, std::ostream& out);
void cmd_sntf_pmf(const ExperimentSpec& spec, std::ostream& out);
void cmd_sntf_moments(const ExperimentSpec& spec, std::ostream& out);
void cmd_ttf(const ExperimentSpec& spec, std::ostream& out);
void cmd_sweep_msntf(const ExperimentSpec& spec, std::ostream& out);
void cmd_sweep_scv(const ExperimentSpec& spec, std::ostream& out);
// Summary goes to `summary`, the histogram CSV to `out`.
void cmd_simulate(const ExperimentSpec& spec, std::ostream& out,
                  std::ostream& summary);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationHooks {
  // Inflates one transient entry of P so the row-sum check must fail.
  bool corrupt_chain = false;
};

std::vector<ValidationCheck> run_validation(const ExperimentSpec& spec,
                                            const ValidationHooks& hooks = {});
// Writes the pass/fail table; returns true iff every check passed.
bool cmd_validate(const ExperimentSpec& spec, std::ostream& out,
                  const ValidationHooks& hooks = {});

// CLI entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace cknb

#endif  // CKNB_EXPERIMENTS_HPP_
