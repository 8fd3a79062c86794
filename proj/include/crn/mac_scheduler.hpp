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
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "crn/network.hpp"

namespace crn {

using UserSet = std::vector<std::int64_t>;

/// Designed active-user count and the matching per-user interference quota.
struct QuotaDesign {
  double k_bar = 0.0;
  double alpha = 0.0;
  std::int64_t cap = 0;  // floor(k_bar); 0 keeps the secondary silent
};

struct MacSchedule {
  UserSet eligible;
  UserSet active;
  double per_user_power = 0.0;
};

struct MacOutcome {
  MacSchedule schedule;
  double rate = 0.0;  // nats per channel use
};

/// k_bar = (Gamma / rho_s)^{K/(K+1)} n^{1/(K+1)} with K = N (primary
/// broadcast) or M (primary MAC, one virtual user per antenna). This solves
/// k = n (alpha / rho_s)^K with alpha = Gamma / k, i.e. the small-quota
/// approximation of E|A| = k.
inline QuotaDesign design_quota(const SystemConfig& cfg) {
  const double k = cfg.constraint_count();
  const double gamma = cfg.min_tolerance();
  const double n = static_cast<double>(cfg.secondary_users);
  QuotaDesign q;
  q.k_bar = std::pow(gamma / cfg.secondary_user_power, k / (k + 1.0)) * std::pow(n, 1.0 / (k + 1.0));
  q.alpha = gamma / q.k_bar;
  q.cap = static_cast<std::int64_t>(std::floor(q.k_bar));
  return q;
}

/// Users whose interference rho_s |[G_p]_{j,i}|^2 is strictly below alpha on
/// every primary constraint j. Returned in ascending order.
inline UserSet eligible_set(const ComplexMatrix& secondary_to_primary, double alpha, double rho_s) {
  if (!(alpha > 0.0)) throw std::invalid_argument("eligible_set: alpha must be positive");
  UserSet out;
  for (Eigen::Index i = 0; i < secondary_to_primary.cols(); ++i) {
    bool ok = true;
    for (Eigen::Index j = 0; j < secondary_to_primary.rows() && ok; ++j)
      ok = rho_s * std::norm(secondary_to_primary(j, i)) < alpha;
    if (ok) out.push_back(i);
  }
  return out;
}

/// All of `eligible` if it fits under `cap`, otherwise a uniform cap-subset
/// drawn by a partial Fisher-Yates shuffle. Output is sorted.
inline UserSet select_active(const UserSet& eligible, std::int64_t cap, RandomStream stream) {
  if (cap < 0) cap = 0;
  if (static_cast<std::int64_t>(eligible.size()) <= cap) return eligible;
  UserSet pool = eligible;
  StreamEngine engine(stream);
  const auto size = static_cast<std::uint64_t>(pool.size());
  for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(cap); ++k) {
    const std::uint64_t j = k + engine.uniform_below(size - k);
    std::swap(pool[k], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(cap));
  std::sort(pool.begin(), pool.end());
  return pool;
}

/// Columns `users` of `m`, in the given order.
inline ComplexMatrix select_columns(const ComplexMatrix& m, const UserSet& users) {
  ComplexMatrix out(m.rows(), static_cast<Eigen::Index>(users.size()));
  for (std::size_t k = 0; k < users.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(users[k]);
  return out;
}

/// log det(I + rho H_S H_S^H + G_s Q_p G_s^H) - log det(I + G_s Q_p G_s^H).
inline double mac_sum_rate(const ComplexMatrix& active_forward, double rho, const ComplexMatrix& primary_to_secondary,
                           const HermitianMatrix& q_p) {
  if (active_forward.cols() == 0) return 0.0;
  const Eigen::Index m = active_forward.rows();
  if (primary_to_secondary.rows() != m) throw std::invalid_argument("mac_sum_rate: G_s rows must equal H rows");
  HermitianMatrix base = HermitianMatrix::Identity(m, m);
  base.noalias() += primary_to_secondary * q_p * primary_to_secondary.adjoint();
  HermitianMatrix with_signal = base;
  with_signal.noalias() += rho * (active_forward * active_forward.adjoint());
  return std::max(0.0, logdet_hpd(with_signal) - logdet_hpd(base));
}

/// Threshold-based user selection followed by on-off power at rho_s.
inline MacOutcome schedule_and_rate(const SystemConfig& cfg, const ChannelRealization& chan, RandomStream stream) {
  if (cfg.secondary_mode != SecondaryMode::Mac) throw std::invalid_argument("schedule_and_rate: secondary must be MAC");
  const QuotaDesign quota = design_quota(cfg);
  MacOutcome out;
  out.schedule.per_user_power = cfg.secondary_user_power;
  if (quota.cap == 0) return out;
  out.schedule.eligible = eligible_set(chan.secondary_to_primary, quota.alpha, cfg.secondary_user_power);
  out.schedule.active = select_active(out.schedule.eligible, quota.cap, stream.derive(stream_label::kSelection));
  out.rate = mac_sum_rate(select_columns(chan.forward, out.schedule.active), cfg.secondary_user_power,
                          chan.primary_to_secondary, primary_covariance(cfg));
  return out;
}

/// Interference of the scheduled users on every primary constraint.
inline RealVector mac_interference(const ChannelRealization& chan, const MacSchedule& schedule) {
  const auto k = static_cast<Eigen::Index>(schedule.active.size());
  return interference_on_primary(select_columns(chan.secondary_to_primary, schedule.active),
                                 HermitianMatrix::Identity(k, k) * Complex(schedule.per_user_power, 0.0));
}

/// MAC constraints are strict: every entry must be below its tolerance.
inline bool mac_within_tolerance(const SystemConfig& cfg, const RealVector& interference) {
  for (Eigen::Index l = 0; l < interference.size(); ++l)
    if (!(interference(l) < cfg.tolerance_at(static_cast<std::size_t>(l)))) return false;
  return true;
}

/// Gamma_0 n^{-q}.
inline double gamma_power_law(double gamma0, double q, std::int64_t n) {
  if (!(gamma0 > 0.0) || !(q >= 0.0) || n < 1) throw std::invalid_argument("gamma_power_law: need gamma0 > 0, q >= 0, n >= 1");
  return gamma0 * std::pow(static_cast<double>(n), -q);
}

}  // namespace crn
