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

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "cknb/error.hpp"
#include "cknb/experiments.hpp"

namespace cknb {

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNoTieSets:
      return kExitInfeasible;
    case ErrorKind::kCapacityExceeded:
    case ErrorKind::kSingularSystem:
    case ErrorKind::kNonConvergence:
      return kExitNumericalFailure;
    default:
      return kExitConfigError;
  }
}

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> reps;
  std::optional<int> m_max;
  std::optional<double> z_max;
  std::optional<int> threads;
};

void add_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON config file");
  sub->add_option("--out", o.out, "output CSV path (default: stdout)");
  sub->add_option("--seed", o.seed, "master RNG seed");
  sub->add_option("--reps", o.reps, "Monte Carlo replications")
      ->check(CLI::PositiveNumber);
  sub->add_option("--m-max", o.m_max, "largest shock count in pmf output")
      ->check(CLI::PositiveNumber);
  sub->add_option("--z-max", o.z_max, "right end of the time grid")
      ->check(CLI::PositiveNumber);
  sub->add_option("--threads", o.threads, "worker threads")
      ->check(CLI::PositiveNumber);
}

ExperimentSpec resolve_spec(const Overrides& o) {
  ExperimentSpec spec = o.config.empty() ? ExperimentSpec{} : load_config(o.config);
  if (!o.out.empty()) spec.out_path = o.out;
  if (o.seed) spec.seed = *o.seed;
  if (o.reps) spec.reps = *o.reps;
  if (o.m_max) spec.m_max = *o.m_max;
  if (o.z_max) spec.z_max = *o.z_max;
  if (o.threads) spec.threads = *o.threads;
  return spec;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Lifetime analysis of circular k-out-of-n:G balanced systems",
               "cknb"};
  app.require_subcommand(1);
  Overrides o;
  using Command = std::function<int(const ExperimentSpec&, std::ostream&)>;
  const std::map<std::string, std::pair<std::string, Command>> commands = {
      {"tiesets",
       {"list the minimum tie-sets",
        [](const ExperimentSpec& s, std::ostream& os) {
          cmd_tiesets(s, os);
          return 0;
        }}},
      {"sntf-pmf",
       {"pmf and survival of the shock count to failure",
        [](const ExperimentSpec& s, std::ostream& os) {
          cmd_sntf_pmf(s, os);
          return 0;
        }}},
      {"sntf-moments",
       {"moments of the shock count to failure",
        [](const ExperimentSpec& s, std::ostream& os) {
          cmd_sntf_moments(s, os);
          return 0;
        }}},
      {"ttf",
       {"density and survival of the time to failure",
        [](const ExperimentSpec& s, std::ostream& os) {
          cmd_ttf(s, os);
          return 0;
        }}},
      {"sweep-msntf",
       {"mean shock count to failure over a grid",
        [](const ExperimentSpec& s, std::ostream& os) {
          cmd_sweep_msntf(s, os);
          return 0;
        }}},
      {"sweep-scv",
       {"MTTF and SCV of the time to failure over a grid",
        [](const ExperimentSpec& s, std::ostream& os) {
          cmd_sweep_scv(s, os);
          return 0;
        }}},
      {"simulate",
       {"Monte Carlo simulation; summary to stderr, histogram to output",
        [&err](const ExperimentSpec& s, std::ostream& os) {
          cmd_simulate(s, os, err);
          return 0;
        }}},
      {"validate",
       {"run analytic and simulation cross-checks",
        [](const ExperimentSpec& s, std::ostream& os) {
          return cmd_validate(s, os) ? int{kExitOk}
                                     : int{kExitValidationFailed};
        }}},
  };
  for (const auto& [name, entry] : commands) {
    add_flags(app.add_subcommand(name, entry.first), o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitConfigError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const ExperimentSpec spec = resolve_spec(o);
    if (spec.out_path.empty()) return commands.at(name).second(spec, out);
    std::ofstream file(spec.out_path);
    if (!file) {
      err << "error: cannot write '" << spec.out_path << "'\n";
      return kExitConfigError;
    }
    const int code = commands.at(name).second(spec, file);
    file.flush();
    return code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
}

}  // namespace cknb
