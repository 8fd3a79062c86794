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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "crn/bc_scheduler.hpp"
#include "crn/mac_scheduler.hpp"
#include "crn/theory.hpp"

namespace crn {

/// Sample mean with its standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample stdev / sqrt(trials)
  std::int64_t trials = 0;
};

enum class GammaLaw { Constant, PowerLaw, LogLaw };

/// Interference tolerance as a function of the number of secondary users.
struct GammaSchedule {
  GammaLaw law = GammaLaw::Constant;
  double gamma0 = 2.0;
  double q = 0.0;

  [[nodiscard]] double at(std::int64_t n) const {
    switch (law) {
      case GammaLaw::Constant:
        return gamma0;
      case GammaLaw::PowerLaw:
        return gamma_power_law(gamma0, q, n);
      case GammaLaw::LogLaw:
        return gamma_log_law(gamma0, q, n);
    }
    return gamma0;
  }
};

struct ExperimentSpec {
  SystemConfig cfg;
  std::vector<std::int64_t> n_grid;
  std::int64_t trials = 2000;
  std::uint64_t seed = 1;
  GammaSchedule schedule;
  int workers = 1;

  void validate() const {
    cfg.validate();
    if (trials < 2) throw ConfigError("trials must be >= 2 (standard error undefined otherwise)");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (n_grid.empty()) throw ConfigError("n grid is empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      if (n_grid[i] < 1) throw ConfigError("n grid entries must be >= 1");
      if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ConfigError("n grid must be strictly increasing");
    }
    if (!(schedule.gamma0 > 0.0) || !std::isfinite(schedule.gamma0)) throw ConfigError("gamma must be positive");
    if (schedule.law == GammaLaw::PowerLaw && !(schedule.q >= 0.0 && std::isfinite(schedule.q)))
      throw ConfigError("power-law exponent q must be >= 0");
    if (schedule.law == GammaLaw::LogLaw) {
      if (!(schedule.q > 0.0 && schedule.q < 1.0)) throw ConfigError("log-law exponent q must lie in (0, 1)");
      if (n_grid.front() < 3) throw ConfigError("log-law schedule needs n >= 3");
    }
    if (!cfg.tolerances.empty() && schedule.law != GammaLaw::Constant)
      throw ConfigError("per-constraint tolerances cannot be combined with a decaying gamma schedule");
  }
};

struct SweepRow {
  std::int64_t n = 0;
  double gamma = 0.0;
  Estimate estimate;
  BoundsReport bounds;
  double leading_term = 0.0;
  std::int64_t violations = 0;
};

struct TrialOutcome {
  double rate = 0.0;
  bool violated = false;
};

/// Stream of trial `trial` at user count n; independent of grid order and of
/// how trials are split across workers.
inline RandomStream trial_stream(std::uint64_t seed, std::int64_t n, std::int64_t trial) {
  return RandomStream{seed, 0}.derive(static_cast<std::uint64_t>(n)).derive(static_cast<std::uint64_t>(trial));
}

/// Evaluates fn(t) for t in [0, trials) on `workers` threads. Results are
/// stored by index, so the output does not depend on the worker count.
template <class Fn>
auto run_trials(std::int64_t trials, int workers, Fn fn) -> std::vector<decltype(fn(std::int64_t{}))> {
  using Result = decltype(fn(std::int64_t{}));
  std::vector<Result> results(static_cast<std::size_t>(std::max<std::int64_t>(trials, 0)));
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::int64_t>(trials, 1))));
  if (workers == 1) {
    for (std::int64_t t = 0; t < trials; ++t) results[static_cast<std::size_t>(t)] = fn(t);
    return results;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::int64_t t = w; t < trials; t += workers) results[static_cast<std::size_t>(t)] = fn(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Mean and standard error, accumulated in index order.
inline Estimate summarize(const std::vector<double>& values) {
  if (values.size() < 2) throw std::invalid_argument("summarize: need at least two samples");
  const double count = static_cast<double>(values.size());
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / count;
  double sq = 0.0;
  for (const double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / (count - 1.0) / count), static_cast<std::int64_t>(values.size())};
}

/// One block: draw channels, schedule, and check the interference constraints.
inline TrialOutcome run_trial(const SystemConfig& cfg, RandomStream stream) {
  const ChannelRealization chan = draw_channels(cfg, stream);
  if (cfg.secondary_mode == SecondaryMode::Mac) {
    const MacOutcome out = schedule_and_rate(cfg, chan, stream);
    return {out.rate, !mac_within_tolerance(cfg, mac_interference(chan, out.schedule))};
  }
  const BcOutcome out = assign_and_rate(cfg, chan, stream);
  return {out.rate, !bc_within_tolerance(cfg, bc_interference(chan.secondary_to_primary, out.schedule.power))};
}

struct ThroughputRun {
  Estimate estimate;
  std::int64_t violations = 0;
};

inline ThroughputRun run_throughput(const SystemConfig& cfg, std::int64_t trials, std::uint64_t seed, int workers = 1) {
  cfg.validate();
  if (trials < 2) throw ConfigError("trials must be >= 2 (standard error undefined otherwise)");
  const auto outcomes = run_trials(trials, workers, [&](std::int64_t t) {
    return run_trial(cfg, trial_stream(seed, cfg.secondary_users, t));
  });
  std::vector<double> rates;
  rates.reserve(outcomes.size());
  ThroughputRun run;
  for (const auto& o : outcomes) {
    rates.push_back(o.rate);
    run.violations += o.violated ? 1 : 0;
  }
  run.estimate = summarize(rates);
  return run;
}

/// Sample-mean estimate of the average secondary throughput at cfg.
inline Estimate estimate_throughput(const SystemConfig& cfg, std::int64_t trials, std::uint64_t seed, int workers = 1) {
  return run_throughput(cfg, trials, seed, workers).estimate;
}

/// Closed-form bounds and leading term for one grid point, no simulation.
inline std::pair<BoundsReport, double> closed_form(const SystemConfig& cfg, std::int64_t n, double gamma) {
  if (cfg.secondary_mode == SecondaryMode::Mac) return {mac_throughput_bounds(cfg, n, gamma), mac_upper_leading_term(cfg, n)};
  const double leading = n >= 2 ? cfg.secondary_antennas * std::log(gamma * std::log(static_cast<double>(n)))
                                : std::numeric_limits<double>::quiet_NaN();
  return {bc_throughput_bounds(cfg, n, gamma), leading};
}

inline std::vector<SweepRow> run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<SweepRow> rows;
  rows.reserve(spec.n_grid.size());
  for (const std::int64_t n : spec.n_grid) {
    SystemConfig cfg = spec.cfg;
    cfg.secondary_users = n;
    SweepRow row;
    row.n = n;
    row.gamma = spec.schedule.at(n);
    if (cfg.tolerances.empty()) cfg.tolerance = row.gamma;
    const ThroughputRun run = run_throughput(cfg, spec.trials, spec.seed, spec.workers);
    row.estimate = run.estimate;
    row.violations = run.violations;
    std::tie(row.bounds, row.leading_term) = closed_form(cfg, n, row.gamma);
    rows.push_back(row);
  }
  return rows;
}

/// Ordinary least-squares slope of ys against xs.
inline double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("least_squares_slope: need matching inputs");
  const double count = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares_slope: abscissa has no spread");
  return sxy / sxx;
}

enum class Abscissa { LogN, LogLogN };

/// Slope of the estimated mean against log n or log log n.
inline double fit_slope(const std::vector<SweepRow>& rows, Abscissa abscissa) {
  if (rows.size() < 3) throw std::invalid_argument("fit_slope: need at least three rows");
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    const double log_n = std::log(static_cast<double>(r.n));
    xs.push_back(abscissa == Abscissa::LogN ? log_n : std::log(log_n));
    ys.push_back(r.estimate.mean);
  }
  return least_squares_slope(xs, ys);
}

/// Kolmogorov-Smirnov statistic sup |F_emp - F| against a continuous cdf.
inline double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 100) throw std::invalid_argument("ks_distance: need at least 100 samples");
  std::sort(samples.begin(), samples.end());
  const double count = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / count, static_cast<double>(i + 1) / count - f});
  }
  return d;
}

/// Asymptotic one-sample KS critical value sqrt(-ln(alpha/2) / 2) / sqrt(n);
/// 1.628 / sqrt(n) at alpha = 0.01.
inline double ks_critical_value(std::size_t samples, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(samples));
}

}  // namespace crn
