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
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "crn/bc_scheduler.hpp"
#include "crn/mac_scheduler.hpp"

namespace crn {

inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Closed-form throughput bounds in nats. The O(.) remainders the
/// asymptotic statements carry are not evaluated; `dropped_terms` names them.
struct BoundsReport {
  double lower = 0.0;
  double upper = 0.0;
  bool regime_ok = true;
  std::string dropped_terms;
};

/// Leading-order centering sequences for the maxima of the L and U ratio
/// variables, conditioned on transmit power rho.
struct AsymptoticSeq {
  double b_n = 0.0;
  double d_n = 0.0;
  double a_n = 0.0;
  double c_n = 0.0;
  double rho = 0.0;
  int m = 0;
  int M = 0;
};

/// Lower bound on E[log det(I + q W W^H)] for an m x mp CN(0,1) matrix W:
/// m_min log(1 + q exp((1/m_min) sum_{j=1}^{m_min} sum_{i=1}^{m_max-j} 1/i - gamma)).
inline double interference_rate_constant(int m, int mp, double power) {
  if (m < 1 || mp < 1 || !(power > 0.0)) throw std::invalid_argument("interference_rate_constant: need m, mp >= 1 and power > 0");
  const int m_min = std::min(m, mp);
  const int m_max = std::max(m, mp);
  double harmonic = 0.0;
  for (int j = 1; j <= m_min; ++j)
    for (int i = 1; i <= m_max - j; ++i) harmonic += 1.0 / i;
  return m_min * std::log1p(power * std::exp(harmonic / m_min - kEulerGamma));
}

/// Sandwich for the threshold-scheduled secondary MAC at interference level
/// gamma_n. K = N (primary broadcast) or M (primary MAC).
///
///   R >= (m/(K+1)) log n + (m/(K+1)) log(rho_s gamma_n^K) - m log(1 + P_I)
///   R <= (m/(K+1)) log n + (m/(K+1)) log(rho_s gamma_n^K) - R_I
///
/// where P_I is the total primary power received (P_p, or N rho_p) and R_I
/// the interference-rate constant. Both follow from m log(rho_s k_bar).
inline BoundsReport mac_throughput_bounds(const SystemConfig& cfg, std::int64_t n, double gamma_n) {
  if (!(gamma_n > 0.0) || n < 1) throw std::invalid_argument("mac_throughput_bounds: need gamma_n > 0 and n >= 1");
  const double m = cfg.secondary_antennas;
  const bool primary_bc = cfg.primary_mode == PrimaryMode::Broadcast;
  const int k = cfg.constraint_count();
  const double growth = m / (k + 1.0) * std::log(static_cast<double>(n));
  const double offset = m / (k + 1.0) * (std::log(cfg.secondary_user_power) + k * std::log(gamma_n));
  const double penalty_lower = m * std::log1p(primary_bc ? cfg.primary_power : cfg.primary_users * cfg.primary_user_power);
  const double penalty_upper = primary_bc ? interference_rate_constant(cfg.secondary_antennas, cfg.primary_antennas, cfg.primary_power / cfg.primary_antennas)
                                          : interference_rate_constant(cfg.secondary_antennas, cfg.primary_users, cfg.primary_user_power);
  BoundsReport r;
  r.lower = growth + offset - penalty_lower;
  r.upper = growth + offset - penalty_upper;
  r.regime_ok = penalty_lower >= penalty_upper;
  r.dropped_terms = k == 1 ? "lower: O(n^{-1/2} log n); upper: O(n^{-1/2})"
                           : "lower: O(n^{-1/" + std::to_string(k + 1) + "} log n); upper: O(n^{-1/" +
                                 std::to_string(k + 1) + "})";
  return r;
}

/// Leading term of the upper bound on the best achievable MAC throughput:
/// (m/(K+1)) log n. The O(log log n) slack is not included.
inline double mac_upper_leading_term(const SystemConfig& cfg, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("mac_upper_leading_term: n must be >= 1");
  return cfg.secondary_antennas / (cfg.constraint_count() + 1.0) * std::log(static_cast<double>(n));
}

namespace detail {

// Upper integration limit where K Gamma(s+1) upper tail mass drops below 1e-15.
inline double max_gamma_upper_limit(int count, int shape) {
  return boost::math::gamma_q_inv(shape + 1.0, 1e-15 / (count * static_cast<double>(shape)));
}

template <class F>
double integrate(F f, double lo, double hi) {
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-13, &error);
}

}  // namespace detail

/// E[max of `count` i.i.d. Gamma(shape, 1)] = int_0^inf (1 - F(x)^K) dx.
inline double max_gamma_mean(int count, int shape) {
  if (count < 1 || shape < 1) throw std::invalid_argument("max_gamma_mean: need count, shape >= 1");
  const double s = shape;
  const auto survival = [count, s](double x) {
    const double q = boost::math::gamma_q(s, x);
    return -std::expm1(count * std::log1p(-q));
  };
  return detail::integrate(survival, 0.0, detail::max_gamma_upper_limit(count, shape));
}

/// (E[1 / max of `count` i.i.d. Gamma(shape, 1)])^{-1}. The expectation is
/// finite only when count * shape > 1.
inline double max_gamma_harmonic_mean(int count, int shape) {
  if (count < 1 || shape < 1) throw std::invalid_argument("max_gamma_harmonic_mean: need count, shape >= 1");
  if (count * shape <= 1) throw std::domain_error("max_gamma_harmonic_mean: E[1/max] diverges for count * shape <= 1");
  const double s = shape;
  const auto integrand = [count, s](double x) {
    if (x <= 0.0) return 0.0;  // endpoint is never sampled by Gauss-Kronrod
    const double f = boost::math::gamma_p_derivative(s, x);
    const double cdf = boost::math::gamma_p(s, x);
    return count * std::pow(cdf, count - 1) * f / x;
  };
  const double inverse_mean = detail::integrate(integrand, 0.0, detail::max_gamma_upper_limit(count, shape));
  return 1.0 / inverse_mean;
}

struct MaxGammaConstants {
  double mu_mean = 0.0;
  double mu_harm = 0.0;
};

inline MaxGammaConstants mu_max_gamma(int count, int shape) {
  return {max_gamma_mean(count, shape), max_gamma_harmonic_mean(count, shape)};
}

/// Random-beamforming sandwich at interference level gamma_n, with
/// mu_mean / mu_harm taken over the K rows of G_p (each Gamma(m, 1)):
///
///   R > m log(gamma_n log n) - m log(mu_mean + m gamma_n / P_s)
///   R < m log(gamma_n log n) - m log(mu_harm)
///
/// regime_ok is false outside m q_p / P_s >= 1 or for n < 2.
inline BoundsReport bc_throughput_bounds(const SystemConfig& cfg, std::int64_t n, double gamma_n) {
  if (!(gamma_n > 0.0) || n < 1) throw std::invalid_argument("bc_throughput_bounds: need gamma_n > 0 and n >= 1");
  const double m = cfg.secondary_antennas;
  const int k = cfg.constraint_count();
  const MaxGammaConstants mu = mu_max_gamma(k, cfg.secondary_antennas);
  BoundsReport r;
  r.dropped_terms = "lower: O(log log n / log n); upper: O(1)";
  if (n < 2) {
    r.lower = r.upper = std::numeric_limits<double>::quiet_NaN();
    r.regime_ok = false;
    return r;
  }
  const double common = m * std::log(gamma_n * std::log(static_cast<double>(n)));
  r.lower = common - m * std::log(mu.mu_mean + m * gamma_n / cfg.secondary_power);
  r.upper = common - m * std::log(mu.mu_harm);
  r.regime_ok = sandwich_regime(cfg);
  return r;
}

/// b_n = (rho/m) log n - (rho (m+M-1)/m) log log n,
/// d_n = (rho/m) log n - (rho M/m) log log n, a_n = c_n = rho/m.
/// Leading terms only: O(log log log n) and O(1/log n) remainders are dropped.
/// Takes log n directly so that astronomically large n can be evaluated.
inline AsymptoticSeq ratio_max_centering_at_log(double log_n, double rho, int m, int M) {
  if (!(log_n >= std::log(16.0))) throw std::invalid_argument("ratio_max_centering: n must be >= 16");
  if (!(rho > 0.0) || m < 1 || M < 1) throw std::invalid_argument("ratio_max_centering: need rho > 0, m, M >= 1");
  const double loglog_n = std::log(log_n);
  const double scale = rho / m;
  return {scale * (log_n - (m + M - 1) * loglog_n), scale * (log_n - M * loglog_n), scale, scale, rho, m, M};
}

inline AsymptoticSeq ratio_max_centering(std::int64_t n, double rho, int m, int M) {
  if (n < 16) throw std::invalid_argument("ratio_max_centering: n must be >= 16");
  return ratio_max_centering_at_log(std::log(static_cast<double>(n)), rho, m, M);
}

/// cdf of L = Z / (c + Y), Z ~ Exp(1), Y ~ Gamma(k, theta):
/// 1 - e^{-c x} (1 + theta x)^{-k}.
inline double ratio_cdf(double x, double c, double theta, int k) {
  if (!(c > 0.0) || !(theta > 0.0) || k < 1) throw std::invalid_argument("ratio_cdf: need c, theta > 0 and k >= 1");
  if (x <= 0.0) return 0.0;
  return -std::expm1(-c * x - k * std::log1p(theta * x));
}

/// Greedy optimum of the relaxed sum-power problem: users sorted by total
/// cross gain |g_{p,i}|^2 are switched on at rho_s while the summed
/// interference stays within the pooled budget; the first user that would
/// overflow gets the fractional remainder.
inline double relaxed_sum_power(const ComplexMatrix& secondary_to_primary, double rho_s, double budget) {
  std::vector<double> gains(static_cast<std::size_t>(secondary_to_primary.cols()));
  for (Eigen::Index i = 0; i < secondary_to_primary.cols(); ++i)
    gains[static_cast<std::size_t>(i)] = secondary_to_primary.col(i).squaredNorm();
  std::sort(gains.begin(), gains.end());
  double used = 0.0;
  double total = 0.0;
  for (const double g : gains) {
    if (used + rho_s * g <= budget) {
      used += rho_s * g;
      total += rho_s;
      continue;
    }
    total += (budget - used) / g;
    break;
  }
  return total;
}

/// Upper bound on the sum power of any schedule meeting every per-constraint
/// tolerance gamma: the relaxed problem with budget K * gamma, K = rows of G_p.
inline double sum_power_oracle(const ComplexMatrix& secondary_to_primary, double rho_s, double gamma) {
  return relaxed_sum_power(secondary_to_primary, rho_s, static_cast<double>(secondary_to_primary.rows()) * gamma);
}

}  // namespace crn
