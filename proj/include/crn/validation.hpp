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

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "crn/montecarlo.hpp"

// Self-checks behind `crn_sim validate`. Each check runs a property of the
// model against an independent prediction and reports pass/fail.

namespace crn::validation {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// `base` with the scenario modes and user count replaced. The default
/// SystemConfig is the reference scale: m = 4, M = N = 2, all powers 5,
/// Gamma = 2.
inline SystemConfig reference_config(const SystemConfig& base, SecondaryMode secondary, PrimaryMode primary,
                                     std::int64_t n) {
  SystemConfig cfg = base;
  cfg.secondary_mode = secondary;
  cfg.primary_mode = primary;
  cfg.secondary_users = n;
  return cfg;
}

/// Zero interference violations in all four scenarios.
inline CheckResult check_interference(const SystemConfig& base, std::int64_t trials, std::uint64_t seed, int workers = 1, std::int64_t n = 1000) {
  std::int64_t violations = 0;
  std::string detail;
  for (const auto secondary : {SecondaryMode::Mac, SecondaryMode::Broadcast}) {
    for (const auto primary : {PrimaryMode::Broadcast, PrimaryMode::Mac}) {
      const SystemConfig cfg = reference_config(base, secondary, primary, n);
      const ThroughputRun run = run_throughput(cfg, trials, seed, workers);
      violations += run.violations;
      detail += fmt::format("{}-{}: {} violations / {} trials; ", to_string(secondary), to_string(primary),
                            run.violations, trials);
    }
  }
  return {"interference", violations == 0, detail};
}

/// Mean eligible-set size against n (1 - e^{-alpha/rho_s})^K, within 3 sigma.
inline CheckResult check_binomial(const SystemConfig& base, std::int64_t trials, std::uint64_t seed,
                                  std::int64_t n = 10000) {
  const SystemConfig cfg = reference_config(base, SecondaryMode::Mac, base.primary_mode, n);
  const QuotaDesign quota = design_quota(cfg);
  const double p = std::pow(-std::expm1(-quota.alpha / cfg.secondary_user_power), cfg.constraint_count());
  const double expected = static_cast<double>(n) * p;
  const double sigma = std::sqrt(expected * (1.0 - p) / static_cast<double>(trials));
  double sum = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const ComplexMatrix gp = draw_secondary_to_primary(cfg, trial_stream(seed, n, t));
    sum += static_cast<double>(eligible_set(gp, quota.alpha, cfg.secondary_user_power).size());
  }
  const double mean = sum / static_cast<double>(trials);
  return {"binomial", std::abs(mean - expected) <= 3.0 * sigma,
          fmt::format("mean |A| = {:.4f}, n p = {:.4f}, 3 sigma = {:.4f}", mean, expected, 3.0 * sigma)};
}

/// L <= SINR <= U for every user and beam at the realized power. Requires
/// the theta >= 1 regime.
inline CheckResult check_sandwich(const SystemConfig& base, std::int64_t trials, std::uint64_t seed,
                                  std::int64_t n = 100) {
  const SystemConfig cfg = reference_config(base, SecondaryMode::Broadcast, base.primary_mode, n);
  if (!sandwich_regime(cfg)) return {"sandwich", false, "configuration outside theta >= 1"};
  std::int64_t violations = 0;
  std::int64_t checked = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const RandomStream stream = trial_stream(seed, n, t);
    const ChannelRealization chan = draw_channels(cfg, stream);
    const ComplexMatrix beams = sample_haar_beams(stream.derive(stream_label::kBeams), cfg.secondary_antennas);
    const double power = secondary_tx_power(chan.secondary_to_primary, cfg).value;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < cfg.secondary_antennas; ++j) {
        const SinrSandwich s = sinr_sandwich(i, j, cfg, chan, beams, power);
        ++checked;
        if (!(s.lower <= s.sinr && s.sinr <= s.upper)) ++violations;
      }
    }
  }
  return {"sandwich", violations == 0, fmt::format("{} violations in {} (user, beam) pairs", violations, checked)};
}

struct LDistribution {
  double c = 1.0;
  double theta = 1.0;
  int k = 1;
};

/// Samples of L = Z / (c + Y) with Z ~ Exp(1), Y ~ Gamma(k, theta).
inline std::vector<double> sample_ratio(const LDistribution& d, std::size_t count, RandomStream stream) {
  StreamEngine engine(stream);
  std::vector<double> out(count);
  for (auto& x : out) {
    const double z = engine.exponential();
    x = z / (d.c + engine.gamma_integer(d.k, d.theta));
  }
  return out;
}

/// Samples of L built from channel draws: user gains against one Haar beam
/// set plus the primary cross channel, at fixed power rho.
inline std::vector<double> sample_ratio_from_channels(int m, int primary_dim, double rho, double theta, std::size_t count,
                                                  RandomStream stream) {
  std::vector<double> out(count);
  const double c = m / rho;
  for (std::size_t s = 0; s < count; ++s) {
    const RandomStream draw = stream.derive(s);
    const ComplexMatrix h = sample_cn_matrix(draw.derive(stream_label::kForward), 1, m);
    const ComplexMatrix g = sample_cn_matrix(draw.derive(stream_label::kPrimaryToSecondary), 1, primary_dim);
    const ComplexMatrix beams = sample_haar_beams(draw.derive(stream_label::kBeams), m);
    const Eigen::MatrixXd gains = beam_gains(h, beams);
    out[s] = detail::sandwich_from_gains(gains, 0, 0, c, theta, g.squaredNorm()).lower;
  }
  return out;
}

/// KS distance of synthesized L-samples to ratio_cdf below the 0.01 critical value,
/// for five (c, theta, k) settings including m = 4, M = 2, rho = P_p = 5.
inline CheckResult check_ks(std::size_t samples, std::uint64_t seed) {
  const double critical = ks_critical_value(samples, 0.01);
  bool ok = true;
  std::string detail;
  const RandomStream root{seed, 0x4b53};
  // m = 4, M = 2, rho = P_s = 5, P_p = 5: c = m / rho, theta = m P_p / (M rho), k = m + M - 1.
  {
    const LDistribution d{0.8, 2.0, 5};
    const auto xs = sample_ratio_from_channels(4, 2, 5.0, d.theta, samples, root.derive(0));
    const double dist = ks_distance(xs, [&](double x) { return ratio_cdf(x, d.c, d.theta, d.k); });
    ok = ok && dist < critical;
    detail += fmt::format("channels(c=0.8,theta=2,k=5): D={:.5f}; ", dist);
  }
  const std::vector<LDistribution> settings = {{0.8, 2.0, 5}, {1.0, 1.0, 1}, {0.5, 3.0, 2}, {2.0, 1.5, 3}, {0.25, 1.0, 8}};
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const LDistribution& d = settings[i];
    const auto xs = sample_ratio(d, samples, root.derive(i + 1));
    const double dist = ks_distance(xs, [&](double x) { return ratio_cdf(x, d.c, d.theta, d.k); });
    ok = ok && dist < critical;
    detail += fmt::format("(c={},theta={},k={}): D={:.5f}; ", d.c, d.theta, d.k, dist);
  }
  detail += fmt::format("critical={:.5f}", critical);
  return {"ks", ok, detail};
}

/// Quadrature constants against closed forms and a Monte Carlo estimate.
inline CheckResult check_mu(std::int64_t samples, std::uint64_t seed) {
  double worst = 0.0;
  double harmonic = 0.0;
  for (int k = 1; k <= 10; ++k) {
    harmonic += 1.0 / k;
    worst = std::max(worst, std::abs(max_gamma_mean(k, 1) - harmonic));
  }
  const double harm_err = std::abs(max_gamma_harmonic_mean(2, 1) - 1.0 / (2.0 * std::log(2.0)));
  bool ok = worst <= 1e-8 && harm_err <= 1e-8;

  StreamEngine engine(RandomStream{seed, 0x6d75});
  double sum = 0.0, sum_sq = 0.0, inv = 0.0, inv_sq = 0.0;
  for (std::int64_t s = 0; s < samples; ++s) {
    const double a = engine.gamma_integer(4);
    const double b = engine.gamma_integer(4);
    const double mx = std::max(a, b);
    sum += mx;
    sum_sq += mx * mx;
    inv += 1.0 / mx;
    inv_sq += 1.0 / (mx * mx);
  }
  const double count = static_cast<double>(samples);
  const double mean = sum / count;
  const double mean_se = std::sqrt((sum_sq / count - mean * mean) / count);
  const double inv_mean = inv / count;
  const double inv_se = std::sqrt((inv_sq / count - inv_mean * inv_mean) / count);
  const MaxGammaConstants mu = mu_max_gamma(2, 4);
  const bool mc_ok = std::abs(mean - mu.mu_mean) <= 3.0 * mean_se && std::abs(inv_mean - 1.0 / mu.mu_harm) <= 3.0 * inv_se;
  ok = ok && mc_ok;
  return {"mu", ok,
          fmt::format("max |quad - H_K| = {:.2e}; |harm - 1/(2 ln 2)| = {:.2e}; (K=2,s=4) quad mean {:.6f} vs MC {:.6f} "
                      "+- {:.6f}, quad E[1/max] {:.6f} vs MC {:.6f} +- {:.6f}",
                      worst, harm_err, mu.mu_mean, mean, mean_se, 1.0 / mu.mu_harm, inv_mean, inv_se)};
}

/// rho_s |S| of every threshold schedule never exceeds the relaxed sum-power
/// optimum on the same G_p.
inline CheckResult check_oracle(const SystemConfig& base, std::int64_t trials, std::uint64_t seed,
                                std::int64_t n = 1000) {
  const SystemConfig cfg = reference_config(base, SecondaryMode::Mac, base.primary_mode, n);
  std::int64_t exceptions = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const RandomStream stream = trial_stream(seed, n, t);
    const ChannelRealization chan = draw_channels(cfg, stream);
    const MacOutcome out = schedule_and_rate(cfg, chan, stream);
    const double scheduled = cfg.secondary_user_power * static_cast<double>(out.schedule.active.size());
    double budget = 0.0;
    for (int l = 0; l < cfg.constraint_count(); ++l) budget += cfg.tolerance_at(static_cast<std::size_t>(l));
    if (scheduled > relaxed_sum_power(chan.secondary_to_primary, cfg.secondary_user_power, budget)) ++exceptions;
  }
  return {"oracle", exceptions == 0, fmt::format("{} exceptions in {} schedules", exceptions, trials)};
}

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {"interference", "binomial", "sandwich", "ks", "mu", "oracle"};
  return names;
}

/// Runs one named check. `trials` overrides the per-check default sample size.
inline CheckResult run_check(const std::string& name, const SystemConfig& base, std::optional<std::int64_t> trials,
                             std::uint64_t seed, int workers = 1) {
  if (name == "interference") return check_interference(base, trials.value_or(2000), seed, workers);
  if (name == "binomial") return check_binomial(base, trials.value_or(5000), seed);
  if (name == "sandwich") return check_sandwich(base, trials.value_or(200), seed);
  if (name == "ks") return check_ks(static_cast<std::size_t>(trials.value_or(100000)), seed);
  if (name == "mu") return check_mu(trials.value_or(1000000), seed);
  if (name == "oracle") return check_oracle(base, trials.value_or(2000), seed);
  throw ConfigError("unknown check: " + name);
}

}  // namespace crn::validation
