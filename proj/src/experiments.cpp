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

#include "cknb/experiments.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cknb/continuous_ph.hpp"
#include "cknb/discrete_ph.hpp"
#include "cknb/error.hpp"
#include "cknb/markov_chain.hpp"
#include "cknb/montecarlo.hpp"
#include "cknb/parallel.hpp"
#include "cknb/tiesets.hpp"

namespace cknb {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& field,
                               const std::string& why) {
  throw ConfigError(kExitConfigError, field, why);
}

std::int64_t get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) schema_error(field, "expected an integer");
  return j.get<std::int64_t>();
}

double get_double(const json& j, const std::string& field) {
  if (!j.is_number()) schema_error(field, "expected a number");
  return j.get<double>();
}

std::string get_string(const json& j, const std::string& field) {
  if (!j.is_string()) schema_error(field, "expected a string");
  return j.get<std::string>();
}

int get_bounded_int(const json& j, const std::string& field, std::int64_t lo,
                    std::int64_t hi) {
  const std::int64_t v = get_int(j, field);
  if (v < lo || v > hi) {
    schema_error(field, "must lie in [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

template <typename T, typename Fn>
std::vector<T> get_list(const json& j, const std::string& field, Fn item) {
  std::vector<T> out;
  if (!j.is_array()) {
    out.push_back(item(j, field));
    return out;
  }
  if (j.empty()) schema_error(field, "list must be nonempty");
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(item(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> get_r_list(const json& j, const std::string& field) {
  if (j.is_object()) {
    for (const auto& [key, _] : j.items()) {
      if (key != "from" && key != "to" && key != "step") {
        schema_error(field + "." + key, "unknown field");
      }
    }
    if (!j.contains("from") || !j.contains("to") || !j.contains("step")) {
      schema_error(field, "range needs from, to and step");
    }
    const double from = get_double(j["from"], field + ".from");
    const double to = get_double(j["to"], field + ".to");
    const double step = get_double(j["step"], field + ".step");
    if (!(step > 0.0) || to < from) schema_error(field, "empty range");
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((to - from) / step + 1e-9));
    for (long i = 0; i <= count; ++i) {
      // Round to 12 digits so 0.05 + 0.05 * i prints as written.
      const double v = std::round((from + i * step) * 1e12) / 1e12;
      out.push_back(v);
    }
    return out;
  }
  return get_list<double>(j, field, get_double);
}

void check_r(double r, const std::string& field) {
  if (!(r > 0.0 && r < 1.0)) schema_error(field, "must lie strictly in (0, 1)");
}

BalanceCondition get_bc(const json& j, const std::string& field) {
  try {
    return parse_balance_condition(get_string(j, field));
  } catch (const Error& e) {
    schema_error(field, e.what());
  }
}

ShockPreset get_preset(const json& j, const std::string& field) {
  try {
    return parse_shock_preset(get_string(j, field));
  } catch (const Error& e) {
    schema_error(field, e.what());
  }
}

InterShockSpec get_shock(const json& j) {
  if (!j.is_object()) schema_error("shock", "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "preset" && key != "alpha" && key != "T") {
      schema_error("shock." + key, "unknown field");
    }
  }
  if (j.contains("preset")) {
    if (j.contains("alpha") || j.contains("T")) {
      schema_error("shock", "give either preset or alpha/T, not both");
    }
    return get_preset(j["preset"], "shock.preset");
  }
  if (!j.contains("alpha") || !j.contains("T")) {
    schema_error("shock", "needs preset, or both alpha and T");
  }
  const json& a = j["alpha"];
  const json& t = j["T"];
  if (!a.is_array() || a.empty()) {
    schema_error("shock.alpha", "expected a nonempty list");
  }
  const auto k = static_cast<Eigen::Index>(a.size());
  ContinuousPhaseType y;
  y.alpha.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    y.alpha(i) = get_double(a[i], "shock.alpha[" + std::to_string(i) + "]");
  }
  if (!t.is_array() || static_cast<Eigen::Index>(t.size()) != k) {
    schema_error("shock.T", "expected K rows with K = |alpha|");
  }
  y.T.resize(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const std::string row = "shock.T[" + std::to_string(i) + "]";
    if (!t[i].is_array() || static_cast<Eigen::Index>(t[i].size()) != k) {
      schema_error(row, "expected K entries");
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      y.T(i, c) = get_double(t[i][c], row + "[" + std::to_string(c) + "]");
    }
  }
  try {
    y.validate();
  } catch (const Error& e) {
    schema_error("shock", e.what());
  }
  return y;
}

const std::set<std::string> kTopLevelKeys = {
    "n",       "k",      "r",        "bc",         "shock",
    "grid",    "out",    "m_max",    "z_max",      "z_points",
    "p_max",   "tol",    "reps",     "seed",       "threads",
    "pmf_method", "simulate"};

const SystemConfig& require_system(const ExperimentSpec& spec) {
  if (!spec.system) schema_error("n", "this command needs n and k");
  return *spec.system;
}

const SystemConfig& require_system_with_r(const ExperimentSpec& spec) {
  const SystemConfig& s = require_system(spec);
  if (std::isnan(s.r)) schema_error("r", "this command needs r");
  return s;
}

ContinuousPhaseType require_shock(const SystemConfig& s) {
  if (!s.shock) schema_error("shock", "this command needs an inter-shock law");
  return resolve(*s.shock);
}

std::vector<int> k_values_for(const SweepGrid& grid, int n) {
  std::vector<int> out;
  if (grid.k_values.empty()) {
    for (int k = 2; k <= n - 1; ++k) out.push_back(k);
  } else {
    for (int k : grid.k_values) {
      if (k >= 2 && k <= n - 1) out.push_back(k);
    }
  }
  return out;
}

std::vector<double> linspace(double hi, int points) {
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) out[i] = hi * i / (points - 1);
  return out;
}

}  // namespace

std::vector<double> default_r_grid() {
  std::vector<double> out;
  for (int i = 1; i <= 19; ++i) out.push_back(i / 20.0);
  return out;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

ExperimentSpec parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema_error("", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) schema_error("", "top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!kTopLevelKeys.count(key)) schema_error(key, "unknown field");
  }

  ExperimentSpec spec;
  const bool has_system = j.contains("n") || j.contains("k") ||
                          j.contains("r") || j.contains("shock");
  if (has_system) {
    if (!j.contains("n")) schema_error("n", "required");
    if (!j.contains("k")) schema_error("k", "required");
    SystemConfig s;
    s.n = get_bounded_int(j["n"], "n", 1, kMaxUnits);
    s.k = get_int(j["k"], "k");
    if (s.k < 2 || s.k > s.n) schema_error("k", "must satisfy 2 <= k <= n");
    s.r = std::numeric_limits<double>::quiet_NaN();
    if (j.contains("r")) {
      s.r = get_double(j["r"], "r");
      check_r(s.r, "r");
    }
    if (j.contains("bc")) s.bc = get_bc(j["bc"], "bc");
    if (s.bc == BalanceCondition::kBC1 && s.n % 2 != 0) {
      schema_error("bc", "OddNUnsupported: BC1 requires an even n");
    }
    if (j.contains("shock")) s.shock = get_shock(j["shock"]);
    if (s.n <= kMaxTableUnits) {
      try {
        enumerate_min_tiesets(s.n, s.k, s.bc);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNoTieSets) throw;
        throw ConfigError(kExitInfeasible, "", e.what());
      }
    }
    spec.system = s;
  } else if (j.contains("bc")) {
    spec.grid.bcs.push_back(get_bc(j["bc"], "bc"));
  }

  if (j.contains("out")) spec.out_path = get_string(j["out"], "out");
  if (j.contains("m_max")) {
    spec.m_max = get_bounded_int(j["m_max"], "m_max", 1, 10'000'000);
  }
  if (j.contains("z_max")) {
    spec.z_max = get_double(j["z_max"], "z_max");
    if (!(*spec.z_max > 0.0)) schema_error("z_max", "must be positive");
  }
  if (j.contains("z_points")) {
    spec.z_points = get_bounded_int(j["z_points"], "z_points", 2, 10'000'000);
  }
  if (j.contains("p_max")) {
    spec.p_max = get_bounded_int(j["p_max"], "p_max", 1, 20);
  }
  if (j.contains("tol")) {
    spec.tol = get_double(j["tol"], "tol");
    if (!(spec.tol > 0.0)) schema_error("tol", "must be positive");
  }
  if (j.contains("reps")) {
    spec.reps = get_int(j["reps"], "reps");
    if (spec.reps < 1) schema_error("reps", "must be >= 1");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) {
      schema_error("seed", "expected a nonnegative integer");
    }
    spec.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("threads")) {
    spec.threads = get_bounded_int(j["threads"], "threads", 1, 1024);
  }
  if (j.contains("pmf_method")) {
    const std::string m = get_string(j["pmf_method"], "pmf_method");
    if (m != "direct" && m != "matrix") {
      schema_error("pmf_method", "expected 'direct' or 'matrix'");
    }
    spec.pmf_matrix = m == "matrix";
  }
  if (j.contains("simulate")) {
    const std::string m = get_string(j["simulate"], "simulate");
    if (m != "sntf" && m != "ttf") {
      schema_error("simulate", "expected 'sntf' or 'ttf'");
    }
    spec.simulate_ttf = m == "ttf";
  }

  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) schema_error("grid", "expected an object");
    for (const auto& [key, _] : g.items()) {
      if (key != "n" && key != "k" && key != "r" && key != "bc" &&
          key != "preset") {
        schema_error("grid." + key, "unknown field");
      }
    }
    auto n_item = [](const json& v, const std::string& f) {
      return get_bounded_int(v, f, 3, kMaxTableUnits);
    };
    auto k_item = [](const json& v, const std::string& f) {
      return get_bounded_int(v, f, 2, kMaxTableUnits);
    };
    if (g.contains("n")) spec.grid.n_values = get_list<int>(g["n"], "grid.n", n_item);
    if (g.contains("k")) spec.grid.k_values = get_list<int>(g["k"], "grid.k", k_item);
    if (g.contains("r")) {
      spec.grid.r_values = get_r_list(g["r"], "grid.r");
      for (std::size_t i = 0; i < spec.grid.r_values.size(); ++i) {
        check_r(spec.grid.r_values[i], "grid.r[" + std::to_string(i) + "]");
      }
    }
    if (g.contains("bc")) {
      spec.grid.bcs = get_list<BalanceCondition>(g["bc"], "grid.bc", get_bc);
    }
    if (g.contains("preset")) {
      spec.grid.presets =
          get_list<ShockPreset>(g["preset"], "grid.preset", get_preset);
    }
  }
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema_error("", "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string echo_config(const ExperimentSpec& spec) {
  json j;
  if (spec.system) {
    const SystemConfig& s = *spec.system;
    j["n"] = s.n;
    j["k"] = s.k;
    if (!std::isnan(s.r)) j["r"] = s.r;
    j["bc"] = to_string(s.bc);
    if (s.shock) {
      if (const auto* p = std::get_if<ShockPreset>(&*s.shock)) {
        j["shock"]["preset"] = to_string(*p);
      } else {
        const auto& y = std::get<ContinuousPhaseType>(*s.shock);
        j["shock"]["alpha"] = std::vector<double>(
            y.alpha.data(), y.alpha.data() + y.alpha.size());
        for (Eigen::Index i = 0; i < y.T.rows(); ++i) {
          std::vector<double> row;
          for (Eigen::Index c = 0; c < y.T.cols(); ++c) row.push_back(y.T(i, c));
          j["shock"]["T"].push_back(row);
        }
      }
    }
  }
  if (!spec.grid.n_values.empty()) j["grid"]["n"] = spec.grid.n_values;
  if (!spec.grid.k_values.empty()) j["grid"]["k"] = spec.grid.k_values;
  if (!spec.grid.r_values.empty()) j["grid"]["r"] = spec.grid.r_values;
  for (auto bc : spec.grid.bcs) j["grid"]["bc"].push_back(to_string(bc));
  for (auto p : spec.grid.presets) j["grid"]["preset"].push_back(to_string(p));
  if (!spec.out_path.empty()) j["out"] = spec.out_path;
  j["m_max"] = spec.m_max;
  if (spec.z_max) j["z_max"] = *spec.z_max;
  j["z_points"] = spec.z_points;
  j["p_max"] = spec.p_max;
  j["tol"] = spec.tol;
  j["reps"] = spec.reps;
  j["seed"] = spec.seed;
  j["threads"] = spec.threads;
  j["pmf_method"] = spec.pmf_matrix ? "matrix" : "direct";
  j["simulate"] = spec.simulate_ttf ? "ttf" : "sntf";
  return j.dump(2);
}

// --- commands -----------------------------------------------------------

void cmd_tiesets(const ExperimentSpec& spec, std::ostream& out) {
  const SystemConfig& s = require_system(spec);
  const TieSetCollection tiesets = enumerate_min_tiesets(s.n, s.k, s.bc);
  out << "# n=" << s.n << ",k=" << s.k << ",bc=" << to_string(s.bc) << '\n';
  out << "# count=" << tiesets.size() << '\n';
  if (!std::isnan(s.r) && s.n <= 20) {
    out << "# reliability_exact="
        << format_number(system_reliability_exact(s.n, tiesets, s.r)) << '\n';
    out << "# reliability_product="
        << format_number(system_reliability_product(tiesets, s.r)) << '\n';
  }
  for (const TieSet& t : tiesets.tiesets) {
    const auto members = t.members();
    for (std::size_t i = 0; i < members.size(); ++i) {
      out << (i ? "," : "") << members[i];
    }
    out << '\n';
  }
}

void cmd_sntf_pmf(const ExperimentSpec& spec, std::ostream& out) {
  const SystemConfig& s = require_system_with_r(spec);
  out << "m,pmf,survival\n";
  if (spec.pmf_matrix) {
    const auto chain = build_consolidated(s.n, s.k, s.bc, s.r);
    const auto dist = sntf_distribution(chain);
    Eigen::RowVectorXd v = dist.alpha;
    for (int m = 1; m <= spec.m_max; ++m) {
      const double mass = v.dot(dist.exit);
      v = v * dist.P;
      out << m << ',' << format_number(mass) << ',' << format_number(v.sum())
          << '\n';
    }
    return;
  }
  const auto space = build_state_space(s.n, s.k, s.bc);
  for (int m = 1; m <= spec.m_max; ++m) {
    out << m << ',' << format_number(pmf_direct(space, s.r, m)) << ','
        << format_number(survival_direct(space, s.r, m)) << '\n';
  }
}

void cmd_sntf_moments(const ExperimentSpec& spec, std::ostream& out) {
  const SystemConfig& s = require_system_with_r(spec);
  const auto chain = build_consolidated(s.n, s.k, s.bc, s.r);
  const auto dist = sntf_distribution(chain);
  const double mean = mean_closed(dist);
  const double second = raw_moment_closed(dist, 2);
  out << "quantity,value\n";
  out << "tiesets," << chain.space.tiesets.size() << '\n';
  out << "nonfailed_states," << chain.size() << '\n';
  out << "msntf," << format_number(mean) << '\n';
  out << "msntf_series,"
      << format_number(raw_moment_series(chain, 1, spec.tol)) << '\n';
  out << "variance," << format_number(second - mean * mean) << '\n';
  out << "scv," << format_number((second - mean * mean) / (mean * mean))
      << '\n';
  for (int p = 1; p <= spec.p_max; ++p) {
    out << "factorial_moment_" << p << ','
        << format_number(factorial_moment(dist, p)) << '\n';
  }
  for (int p = 1; p <= spec.p_max; ++p) {
    out << "raw_moment_" << p << ','
        << format_number(raw_moment_closed(dist, p)) << '\n';
  }
  out << "one_shock_survival," << format_number(survival_direct(chain.space, s.r, 1))
      << '\n';
  if (s.n <= 20) {
    out << "reliability_exact,"
        << format_number(
               system_reliability_exact(s.n, chain.space.tiesets, s.r))
        << '\n';
  }
  out << "reliability_product,"
      << format_number(system_reliability_product(chain.space.tiesets, s.r))
      << '\n';
}

void cmd_ttf(const ExperimentSpec& spec, std::ostream& out) {
  const SystemConfig& s = require_system_with_r(spec);
  const ContinuousPhaseType y = require_shock(s);
  const auto chain = build_consolidated(s.n, s.k, s.bc, s.r);
  const auto dist = sntf_distribution(chain);
  const auto z_law = compound_ph(dist, y);
  const double mttf = raw_moment(z_law, 1);
  const double variation = scv(z_law);
  const double wald = mean_closed(dist) * ph_mean_scv(y).mean;
  const double z_max = spec.z_max.value_or(10.0 * mttf);
  out << "z,pdf,survival\n";
  for (const DensityPoint& p :
       evaluate_on_grid(z_law, linspace(z_max, spec.z_points))) {
    out << format_number(p.z) << ',' << format_number(p.pdf) << ','
        << format_number(p.survival) << '\n';
  }
  out << "# mttf=" << format_number(mttf) << ",scv=" << format_number(variation)
      << ",wald_mttf=" << format_number(wald) << '\n';
}

void cmd_sweep_msntf(const ExperimentSpec& spec, std::ostream& out) {
  SweepGrid grid = spec.grid;
  if (grid.n_values.empty()) grid.n_values = {12};
  if (grid.r_values.empty()) grid.r_values = default_r_grid();
  if (grid.bcs.empty()) {
    grid.bcs = {BalanceCondition::kBC1, BalanceCondition::kBC2,
                BalanceCondition::kBC3};
  }
  struct Task {
    BalanceCondition bc;
    int n;
    int k;
  };
  std::vector<Task> tasks;
  for (auto bc : grid.bcs) {
    for (int n : grid.n_values) {
      for (int k : k_values_for(grid, n)) tasks.push_back({bc, n, k});
    }
  }
  std::vector<std::string> blocks(tasks.size());
  parallel_for(static_cast<std::int64_t>(tasks.size()), spec.threads,
               [&](std::int64_t t) {
    const Task& task = tasks[t];
    std::ostringstream rows;
    auto emit = [&](double r, const std::string& value) {
      rows << to_string(task.bc) << ',' << task.n << ',' << task.k << ','
           << format_number(r) << ',' << value << '\n';
    };
    std::optional<StateSpace> space;
    std::string marker;
    try {
      space = build_state_space(task.n, task.k, task.bc);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kNoTieSets) {
        marker = "infeasible";
      } else if (e.kind() == ErrorKind::kOddNUnsupported) {
        marker = "unsupported";
      } else {
        throw;
      }
    }
    for (double r : grid.r_values) {
      if (!space) {
        emit(r, marker);
        continue;
      }
      emit(r, format_number(
                  mean_closed(sntf_distribution(build_consolidated(*space, r)))));
    }
    blocks[t] = rows.str();
  });
  out << "bc,n,k,r,msntf\n";
  for (const auto& b : blocks) out << b;
}

void cmd_sweep_scv(const ExperimentSpec& spec, std::ostream& out) {
  SweepGrid grid = spec.grid;
  if (grid.n_values.empty()) grid.n_values = {12};
  if (grid.r_values.empty()) grid.r_values = {0.9};
  if (grid.bcs.empty()) {
    grid.bcs = {BalanceCondition::kBC1, BalanceCondition::kBC2,
                BalanceCondition::kBC3};
  }
  if (grid.presets.empty()) {
    grid.presets = {ShockPreset::kErlang, ShockPreset::kExponential,
                    ShockPreset::kHyperexponential};
  }
  struct Task {
    BalanceCondition bc;
    int n;
    int k;
  };
  std::vector<Task> tasks;
  for (auto bc : grid.bcs) {
    for (int n : grid.n_values) {
      for (int k : k_values_for(grid, n)) tasks.push_back({bc, n, k});
    }
  }
  // rows[t][p] holds the rows for task t under preset p.
  std::vector<std::vector<std::string>> rows(
      tasks.size(), std::vector<std::string>(grid.presets.size()));
  parallel_for(static_cast<std::int64_t>(tasks.size()), spec.threads,
               [&](std::int64_t t) {
    const Task& task = tasks[t];
    std::optional<StateSpace> space;
    std::string marker;
    try {
      space = build_state_space(task.n, task.k, task.bc);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kNoTieSets) {
        marker = "infeasible";
      } else if (e.kind() == ErrorKind::kOddNUnsupported) {
        marker = "unsupported";
      } else {
        throw;
      }
    }
    for (std::size_t p = 0; p < grid.presets.size(); ++p) {
      std::ostringstream block;
      const ContinuousPhaseType y = ph_from_preset(grid.presets[p]);
      const double y_mean = ph_mean_scv(y).mean;
      for (double r : grid.r_values) {
        block << to_string(grid.presets[p]) << ',' << to_string(task.bc) << ','
              << task.n << ',' << task.k << ',' << format_number(r) << ',';
        if (!space) {
          block << marker << ',' << marker << ',' << marker << '\n';
          continue;
        }
        const auto dist = sntf_distribution(build_consolidated(*space, r));
        const auto z_law = compound_ph(dist, y);
        block << format_number(raw_moment(z_law, 1)) << ','
              << format_number(scv(z_law)) << ','
              << format_number(mean_closed(dist) * y_mean) << '\n';
      }
      rows[t][p] = block.str();
    }
  });
  out << "preset,bc,n,k,r,mttf,scv,wald_mttf\n";
  for (std::size_t p = 0; p < grid.presets.size(); ++p) {
    for (std::size_t t = 0; t < tasks.size(); ++t) out << rows[t][p];
  }
}

void cmd_simulate(const ExperimentSpec& spec, std::ostream& out,
                  std::ostream& summary) {
  const SystemConfig& s = require_system_with_r(spec);
  const auto chain = build_consolidated(s.n, s.k, s.bc, s.r);
  const auto dist = sntf_distribution(chain);
  SimulationResult result;
  double analytic = 0.0;
  if (spec.simulate_ttf) {
    const ContinuousPhaseType y = require_shock(s);
    result = simulate_ttf(s, spec.seed, spec.reps, spec.threads);
    analytic = raw_moment(compound_ph(dist, y), 1);
  } else {
    result = simulate_sntf(s, spec.seed, spec.reps, spec.threads);
    analytic = mean_closed(dist);
  }
  summary << "quantity,value\n";
  summary << "target," << (spec.simulate_ttf ? "ttf" : "sntf") << '\n';
  summary << "replications," << result.replications << '\n';
  summary << "seed," << result.seed << '\n';
  summary << "mean," << format_number(result.mean) << '\n';
  summary << "variance," << format_number(result.variance) << '\n';
  summary << "std_error," << format_number(result.std_error) << '\n';
  summary << "half_width_95," << format_number(result.half_width_95) << '\n';
  for (const auto& [p, v] : result.quantiles) {
    summary << "quantile_" << format_number(p) << ',' << format_number(v)
            << '\n';
  }
  summary << "analytic_mean," << format_number(analytic) << '\n';
  out << "bin_left,bin_right,count\n";
  for (const HistogramBin& b : result.histogram) {
    out << format_number(b.left) << ',' << format_number(b.right) << ','
        << b.count << '\n';
  }
}

// --- validation ---------------------------------------------------------

std::vector<ValidationCheck> run_validation(const ExperimentSpec& spec,
                                            const ValidationHooks& hooks) {
  const SystemConfig& s = require_system_with_r(spec);
  std::vector<ValidationCheck> checks;
  auto record = [&](std::string name, bool ok, std::string detail) {
    checks.push_back({std::move(name), ok, std::move(detail)});
  };
  auto gap_text = [](double gap, double tol) {
    return "max_gap=" + format_number(gap) + " tol=" + format_number(tol);
  };

  ConsolidatedChain chain = build_consolidated(s.n, s.k, s.bc, s.r);
  if (hooks.corrupt_chain) chain.P.coeffRef(0, 0) *= 1.5;
  const Eigen::Index states = chain.size();

  {
    double worst = 0.0;
    bool signs = true;
    bool triangular = true;
    for (Eigen::Index a = 0; a < states; ++a) {
      double row = chain.absorb(a);
      for (SparseRowMatrix::InnerIterator it(chain.P, a); it; ++it) {
        row += it.value();
        signs = signs && it.value() >= 0.0;
        triangular = triangular && it.col() >= a;
      }
      signs = signs && chain.absorb(a) >= -1e-12;
      worst = std::max(worst, std::abs(row - 1.0));
    }
    // absorb was computed before any corruption; recompute from P.
    const Eigen::VectorXd exit = Eigen::VectorXd::Ones(states) -
                                 chain.P * Eigen::VectorXd::Ones(states);
    signs = signs && (exit.array() >= -1e-12).all();
    worst = std::max(worst, (exit - chain.absorb).cwiseAbs().maxCoeff());
    record("chain_rows", worst <= 1e-12 && signs && triangular,
           gap_text(worst, 1e-12) + (triangular ? "" : " not_triangular") +
               (signs ? "" : " negative_entry"));
  }

  const DiscretePhaseType dist = sntf_distribution(chain);
  {
    const auto by_matrix = pmf_matrix_series(dist, 50);
    double worst = 0.0;
    for (int m = 1; m <= 50; ++m) {
      worst = std::max(worst, std::abs(by_matrix[m - 1] -
                                       pmf_direct(chain.space, s.r, m)));
    }
    record("pmf_direct_vs_matrix", worst <= 1e-12, gap_text(worst, 1e-12));
  }

  if (s.n <= 16) {
    const auto reduced = absorbed_by_step(chain, 20);
    const auto full = absorbed_by_step_full(s.n, s.k, s.bc, s.r, 20);
    double worst = 0.0;
    for (std::size_t m = 0; m < full.size(); ++m) {
      worst = std::max(worst, std::abs(reduced[m] - full[m]));
    }
    record("consolidation_fidelity", worst <= 1e-12, gap_text(worst, 1e-12));
  }

  {
    const double closed = mean_closed(dist);
    const double series = raw_moment_series(chain, 1, 1e-12);
    record("mean_closed_vs_series", std::abs(closed - series) <= 1e-9,
           gap_text(std::abs(closed - series), 1e-9));
    const double second = factorial_moment(dist, 2) + closed;
    const double second_series = raw_moment_series(chain, 2, 1e-12);
    record("second_moment_vs_series",
           std::abs(second - second_series) <= 1e-9,
           gap_text(std::abs(second - second_series), 1e-9));
  }

  if (s.n <= 20) {
    const double exact =
        system_reliability_exact(s.n, chain.space.tiesets, s.r);
    const double one_shock = 1.0 - pmf_direct(chain.space, s.r, 1);
    record("reliability_vs_one_shock", std::abs(exact - one_shock) <= 1e-12,
           gap_text(std::abs(exact - one_shock), 1e-12));
    const double product =
        system_reliability_product(chain.space.tiesets, s.r);
    // Informational: the product form ignores overlap between tie-sets.
    record("reliability_product_form", true,
           "product=" + format_number(product) +
               " exact=" + format_number(exact) +
               " gap=" + format_number(product - exact));
  }

  const double msntf = mean_closed(dist);
  {
    const SimulationResult sim =
        simulate_sntf(s, spec.seed, spec.reps, spec.threads);
    const double hw = sim.half_width(0.99);
    record("monte_carlo_sntf_mean", std::abs(sim.mean - msntf) <= hw,
           "analytic=" + format_number(msntf) + " simulated=" +
               format_number(sim.mean) + " half_width_99=" + format_number(hw));
  }

  if (s.shock) {
    const ContinuousPhaseType y = resolve(*s.shock);
    const auto z_law = compound_ph(dist, y);
    const double mttf = raw_moment(z_law, 1);
    const double wald = msntf * ph_mean_scv(y).mean;
    record("wald_identity", std::abs(mttf - wald) <= 1e-8,
           gap_text(std::abs(mttf - wald), 1e-8));

    const double h = 1e-4 * std::max(1.0, mttf);
    double worst = 0.0;
    for (int i = 1; i <= 5; ++i) {
      const double z = mttf * i / 3.0;
      const auto pts = evaluate_on_grid(z_law, {z - h, z, z + h});
      const double slope = (pts[2].survival - pts[0].survival) / (2.0 * h);
      worst = std::max(worst, std::abs(-slope - pts[1].pdf));
    }
    record("pdf_vs_survival_slope", worst <= 1e-5, gap_text(worst, 1e-5));

    const SimulationResult sim =
        simulate_ttf(s, spec.seed, spec.reps, spec.threads);
    const double hw = sim.half_width(0.99);
    record("monte_carlo_ttf_mean", std::abs(sim.mean - mttf) <= hw,
           "analytic=" + format_number(mttf) + " simulated=" +
               format_number(sim.mean) + " half_width_99=" + format_number(hw));
  }
  return checks;
}

bool cmd_validate(const ExperimentSpec& spec, std::ostream& out,
                  const ValidationHooks& hooks) {
  const auto checks = run_validation(spec, hooks);
  bool all = true;
  out << "check,status,detail\n";
  for (const auto& c : checks) {
    out << c.name << ',' << (c.passed ? "pass" : "FAIL") << ',' << c.detail
        << '\n';
    all = all && c.passed;
  }
  return all;
}

}  // namespace cknb
