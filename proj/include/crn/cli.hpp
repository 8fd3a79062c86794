// Copyright 2026 The crnsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "crn/montecarlo.hpp"
#include "crn/validation.hpp"

namespace crn::cli {

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kConfigError = 2, kInvariantBreach = 3 };

inline constexpr std::string_view kCsvHeader =
    "scenario,primary_mode,n,gamma,trials,mean_nats,stderr_nats,bound_lower_nats,bound_upper_nats,leading_term_nats,"
    "violations";

inline std::string scenario_label(const SystemConfig& cfg) {
  return fmt::format("{}-{}", cfg.secondary_mode == SecondaryMode::Mac ? "mac" : "bc",
                     cfg.primary_mode == PrimaryMode::Mac ? "mac" : "bc");
}

inline void apply_scenario(const std::string& label, SystemConfig& cfg) {
  const auto dash = label.find('-');
  const auto mode = [&](const std::string& s) {
    if (s == "mac") return true;
    if (s == "bc") return false;
    throw ConfigError("scenario must be one of mac-bc, mac-mac, bc-bc, bc-mac");
  };
  if (dash == std::string::npos) throw ConfigError("scenario must be one of mac-bc, mac-mac, bc-bc, bc-mac");
  cfg.secondary_mode = mode(label.substr(0, dash)) ? SecondaryMode::Mac : SecondaryMode::Broadcast;
  cfg.primary_mode = mode(label.substr(dash + 1)) ? PrimaryMode::Mac : PrimaryMode::Broadcast;
}

inline std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.12g}", v);
}

/// One CSV line per sweep row. `scale` converts nats to the output unit.
inline std::string csv_row(const SystemConfig& cfg, const SweepRow& row, double scale) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", scenario_label(cfg), to_string(cfg.primary_mode), row.n,
                     format_value(row.gamma), row.estimate.trials, format_value(row.estimate.mean * scale),
                     format_value(row.estimate.std_error * scale), format_value(row.bounds.lower * scale),
                     format_value(row.bounds.upper * scale), format_value(row.leading_term * scale), row.violations);
}

inline std::vector<std::int64_t> parse_grid(const std::string& text) {
  std::vector<std::int64_t> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("n grid entry is not a number: '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size() || v < 1.0 || v != std::floor(v) || v > 1e12)
      throw ConfigError("n grid entry must be a positive integer: '" + item + "'");
    grid.push_back(static_cast<std::int64_t>(v));
  }
  if (grid.empty()) throw ConfigError("n grid is empty");
  return grid;
}

inline std::vector<std::int64_t> default_grid() { return {100, 300, 1000, 3000, 10000, 30000, 100000}; }

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
  return out;
}

inline std::int64_t parse_int(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 9e15) throw ConfigError("config key '" + key + "' expects an integer");
  return static_cast<std::int64_t>(d);
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Applies a flat key=value config file; keys are SystemConfig and
/// ExperimentSpec field names. Blank lines and '#' comments are ignored.
inline void apply_config_text(const std::string& text, ExperimentSpec& spec) {
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("config line {}: expected key=value", lineno));
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    SystemConfig& c = spec.cfg;
    if (key == "primary_antennas") c.primary_antennas = static_cast<int>(detail::parse_int(key, value));
    else if (key == "primary_users") c.primary_users = static_cast<int>(detail::parse_int(key, value));
    else if (key == "secondary_antennas") c.secondary_antennas = static_cast<int>(detail::parse_int(key, value));
    else if (key == "secondary_users") spec.n_grid = {detail::parse_int(key, value)};
    else if (key == "primary_power") c.primary_power = detail::parse_double(key, value);
    else if (key == "primary_user_power") c.primary_user_power = detail::parse_double(key, value);
    else if (key == "secondary_power") c.secondary_power = detail::parse_double(key, value);
    else if (key == "secondary_user_power") c.secondary_user_power = detail::parse_double(key, value);
    else if (key == "tolerance") spec.schedule.gamma0 = c.tolerance = detail::parse_double(key, value);
    else if (key == "tolerances") {
      c.tolerances.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) c.tolerances.push_back(detail::parse_double(key, detail::trim(item)));
    } else if (key == "primary_mode") {
      if (value == "broadcast") c.primary_mode = PrimaryMode::Broadcast;
      else if (value == "mac") c.primary_mode = PrimaryMode::Mac;
      else throw ConfigError("primary_mode must be broadcast or mac");
    } else if (key == "secondary_mode") {
      if (value == "broadcast") c.secondary_mode = SecondaryMode::Broadcast;
      else if (value == "mac") c.secondary_mode = SecondaryMode::Mac;
      else throw ConfigError("secondary_mode must be broadcast or mac");
    } else if (key == "n_grid") spec.n_grid = parse_grid(value);
    else if (key == "trials") spec.trials = detail::parse_int(key, value);
    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(detail::parse_int(key, value));
    else if (key == "workers") spec.workers = static_cast<int>(detail::parse_int(key, value));
    else if (key == "gamma_schedule") {
      if (value == "constant") spec.schedule.law = GammaLaw::Constant;
      else if (value == "power-law") spec.schedule.law = GammaLaw::PowerLaw;
      else if (value == "log-law") spec.schedule.law = GammaLaw::LogLaw;
      else throw ConfigError("gamma_schedule must be constant, power-law or log-law");
    } else if (key == "gamma_q") spec.schedule.q = detail::parse_double(key, value);
    else throw ConfigError(fmt::format("config line {}: unknown key '{}'", lineno, key));
  }
}

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<std::string> n_grid;
  std::optional<double> gamma;
  std::vector<double> power_law;
  std::vector<double> log_law;
  std::optional<std::string> scenario;
  std::string out;
  bool bits = false;
  std::optional<int> workers;
  std::vector<std::string> checks;
};

inline void add_common_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "flat key=value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "64-bit seed");
  cmd->add_option("--trials", f.trials, "trials per grid point");
  cmd->add_option("--workers", f.workers, "worker threads (output does not depend on it)");
  auto* gamma = cmd->add_option("--gamma", f.gamma, "constant interference tolerance");
  auto* power = cmd->add_option("--gamma-power-law", f.power_law, "tolerance G n^{-q}")->expected(2)->type_name("G q");
  auto* log = cmd->add_option("--gamma-log-law", f.log_law, "tolerance G (log n)^{-q}")->expected(2)->type_name("G q");
  gamma->excludes(power)->excludes(log);
  power->excludes(log);
}

inline void add_sweep_flags(CLI::App* cmd, Flags& f) {
  add_common_flags(cmd, f);
  cmd->add_option("--n-grid", f.n_grid, "comma-separated user counts, e.g. 1e3,3e3,1e4");
  cmd->add_option("--scenario", f.scenario, "mac-bc | mac-mac | bc-bc | bc-mac (secondary-primary)");
  cmd->add_option("--out", f.out, "CSV output path (default stdout)");
  cmd->add_flag("--bits", f.bits, "report rates in bits instead of nats");
}

/// defaults < config file < flags.
inline ExperimentSpec resolve_spec(const Flags& f, SecondaryMode default_secondary) {
  ExperimentSpec spec;
  spec.cfg.secondary_mode = default_secondary;
  spec.n_grid = default_grid();
  spec.schedule.gamma0 = spec.cfg.tolerance;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot read config file " + f.config);
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(buf.str(), spec);
  }
  if (f.seed) spec.seed = *f.seed;
  if (f.trials) spec.trials = *f.trials;
  if (f.workers) spec.workers = *f.workers;
  if (f.n_grid) spec.n_grid = parse_grid(*f.n_grid);
  if (f.scenario) apply_scenario(*f.scenario, spec.cfg);
  if (f.gamma) spec.schedule = {GammaLaw::Constant, *f.gamma, 0.0};
  if (!f.power_law.empty()) spec.schedule = {GammaLaw::PowerLaw, f.power_law.at(0), f.power_law.at(1)};
  if (!f.log_law.empty()) spec.schedule = {GammaLaw::LogLaw, f.log_law.at(0), f.log_law.at(1)};
  spec.cfg.tolerance = spec.schedule.gamma0;
  spec.cfg.secondary_users = spec.n_grid.front();
  return spec;
}

inline int write_sweep(const ExperimentSpec& spec, const Flags& f, std::ostream& out, std::ostream& err) {
  const std::vector<SweepRow> rows = run_sweep(spec);
  const double scale = f.bits ? 1.0 / std::log(2.0) : 1.0;
  std::ostringstream csv;
  csv << kCsvHeader << '\n';
  std::int64_t violations = 0;
  for (const auto& row : rows) {
    csv << csv_row(spec.cfg, row, scale) << '\n';
    violations += row.violations;
  }
  if (f.out.empty()) {
    out << csv.str();
  } else {
    std::ofstream file(f.out, std::ios::binary);
    if (!file) throw ConfigError("cannot write " + f.out);
    file << csv.str();
  }
  if (violations > 0) {
    err << "error: " << violations << " interference-constraint violations detected\n";
    return kInvariantBreach;
  }
  return kOk;
}

inline int run_sweep_command(const Flags& f, SecondaryMode mode, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec = resolve_spec(f, mode);
  if (spec.cfg.secondary_mode != mode)
    throw ConfigError(mode == SecondaryMode::Mac ? "mac-sweep needs a mac-* scenario" : "bc-sweep needs a bc-* scenario");
  if (mode == SecondaryMode::Mac && spec.schedule.law == GammaLaw::LogLaw)
    throw ConfigError("mac-sweep supports --gamma or --gamma-power-law");
  if (mode == SecondaryMode::Broadcast && spec.schedule.law == GammaLaw::PowerLaw)
    throw ConfigError("bc-sweep supports --gamma or --gamma-log-law");
  spec.validate();
  return write_sweep(spec, f, out, err);
}

inline int run_bounds_command(const Flags& f, std::ostream& out) {
  ExperimentSpec spec = resolve_spec(f, SecondaryMode::Mac);
  spec.cfg.validate();
  if (spec.schedule.law == GammaLaw::LogLaw && !(spec.schedule.q > 0.0 && spec.schedule.q < 1.0))
    throw ConfigError("log-law exponent q must lie in (0, 1)");
  if (!(spec.schedule.gamma0 > 0.0)) throw ConfigError("gamma must be positive");
  const double scale = f.bits ? 1.0 / std::log(2.0) : 1.0;
  std::ostringstream table;
  table << "scenario,primary_mode,n,gamma,bound_lower_nats,bound_upper_nats,leading_term_nats,regime_ok\n";
  for (const std::int64_t n : spec.n_grid) {
    SystemConfig cfg = spec.cfg;
    cfg.secondary_users = n;
    const double gamma = spec.schedule.at(n);
    cfg.tolerance = gamma;
    const auto [bounds, leading] = closed_form(cfg, n, gamma);
    table << fmt::format("{},{},{},{},{},{},{},{}\n", scenario_label(cfg), to_string(cfg.primary_mode), n,
                         format_value(gamma), format_value(bounds.lower * scale), format_value(bounds.upper * scale),
                         format_value(leading * scale), bounds.regime_ok ? "true" : "false");
  }
  if (f.out.empty()) {
    out << table.str();
  } else {
    std::ofstream file(f.out, std::ios::binary);
    if (!file) throw ConfigError("cannot write " + f.out);
    file << table.str();
  }
  return kOk;
}

inline int run_validate_command(const Flags& f, std::ostream& out) {
  ExperimentSpec spec = resolve_spec(f, SecondaryMode::Mac);
  spec.cfg.validate();
  if (spec.schedule.law != GammaLaw::Constant) throw ConfigError("validate takes a constant --gamma");
  if (f.trials && *f.trials < 1) throw ConfigError("trials must be >= 1");
  std::vector<std::string> checks = f.checks.empty() ? validation::check_names() : f.checks;
  for (const auto& name : checks) {
    const auto& known = validation::check_names();
    if (std::find(known.begin(), known.end(), name) == known.end()) throw ConfigError("unknown check: " + name);
  }
  bool all = true;
  for (const auto& name : checks) {
    const validation::CheckResult r = validation::run_check(name, spec.cfg, f.trials, spec.seed, spec.workers);
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  out << (all ? "all checks passed" : "validation failed") << '\n';
  return all ? kOk : kValidationFailed;
}

/// Entry point shared by the crn_sim binary and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Underlay cognitive radio throughput simulator", "crn_sim"};
  app.require_subcommand(1);
  Flags mac_flags, bc_flags, bounds_flags, validate_flags;
  auto* mac = app.add_subcommand("mac-sweep", "secondary MAC throughput versus n (threshold user selection)");
  add_sweep_flags(mac, mac_flags);
  auto* bc = app.add_subcommand("bc-sweep", "secondary broadcast throughput versus n (random beamforming)");
  add_sweep_flags(bc, bc_flags);
  auto* bounds = app.add_subcommand("bounds", "closed-form bounds over the n grid, no simulation");
  add_sweep_flags(bounds, bounds_flags);
  auto* validate = app.add_subcommand("validate", "run the model self-checks");
  add_common_flags(validate, validate_flags);
  validate->add_option("--check", validate_flags.checks, "run only the named check (repeatable)");

  std::vector<const char*> argv;
  argv.push_back("crn_sim");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (mac->parsed()) return run_sweep_command(mac_flags, SecondaryMode::Mac, out, err);
    if (bc->parsed()) return run_sweep_command(bc_flags, SecondaryMode::Broadcast, out, err);
    if (bounds->parsed()) return run_bounds_command(bounds_flags, out);
    if (validate->parsed()) return run_validate_command(validate_flags, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInvariantBreach;
  }
  return kConfigError;
}

}  // namespace crn::cli
