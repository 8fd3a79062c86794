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
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "crn/network.hpp"

namespace crn {

/// Interference-capped total transmit power of the secondary base station.
struct PowerCap {
  double value = 0.0;
  int degenerate_rows = 0;  // zero-norm G_p rows, treated as non-binding
};

struct BeamWinner {
  std::int64_t user = -1;
  double sinr = 0.0;
};

struct BcSchedule {
  ComplexMatrix beams;  // m x m, orthonormal columns
  double power = 0.0;
  std::vector<BeamWinner> winners;  // one per beam
};

struct BcOutcome {
  BcSchedule schedule;
  double rate = 0.0;  // nats per channel use
  int degenerate_rows = 0;
};

/// Equal-split interference (power / m) |g_{p,l}|^2 on every constraint.
inline RealVector bc_interference(const ComplexMatrix& secondary_to_primary, double power) {
  const Eigen::Index m = secondary_to_primary.cols();
  return interference_on_primary(secondary_to_primary,
                                 HermitianMatrix::Identity(m, m) * Complex(power / static_cast<double>(m), 0.0));
}

/// Broadcast constraints allow equality.
inline bool bc_within_tolerance(const SystemConfig& cfg, const RealVector& interference) {
  for (Eigen::Index l = 0; l < interference.size(); ++l)
    if (!(interference(l) <= cfg.tolerance_at(static_cast<std::size_t>(l)))) return false;
  return true;
}

/// min(P_s, min_l m Gamma_l / |g_{p,l}|^2). The result is stepped down by
/// ulps until bc_interference reproduces the bound without rounding excess.
inline PowerCap secondary_tx_power(const ComplexMatrix& secondary_to_primary, const SystemConfig& cfg) {
  if (secondary_to_primary.rows() != cfg.constraint_count() || secondary_to_primary.cols() != cfg.secondary_antennas)
    throw std::invalid_argument("secondary_tx_power: G_p must be K x m");
  const double m = cfg.secondary_antennas;
  PowerCap cap{cfg.secondary_power, 0};
  for (Eigen::Index l = 0; l < secondary_to_primary.rows(); ++l) {
    const double gain = secondary_to_primary.row(l).squaredNorm();
    if (gain == 0.0) {
      ++cap.degenerate_rows;
      continue;
    }
    cap.value = std::min(cap.value, m * cfg.tolerance_at(static_cast<std::size_t>(l)) / gain);
  }
  while (cap.value > 0.0 && !bc_within_tolerance(cfg, bc_interference(secondary_to_primary, cap.value)))
    cap.value = std::nextafter(cap.value, 0.0);
  return cap;
}

/// |h_i^H phi_k|^2 for every user i (rows) and beam k (columns).
inline Eigen::MatrixXd beam_gains(const ComplexMatrix& forward, const ComplexMatrix& beams) {
  return (forward * beams).cwiseAbs2();
}

namespace detail {

// SINR of user i on beam j given its beam gains, the per-beam power p/m and
// the primary interference g_{s,i}^H Q_p g_{s,i}.
inline double sinr_from_gains(const Eigen::MatrixXd& gains, Eigen::Index i, Eigen::Index j, double power_per_beam,
                              double primary) {
  double cross = 0.0;
  for (Eigen::Index k = 0; k < gains.cols(); ++k)
    if (k != j) cross += gains(i, k);
  return power_per_beam * gains(i, j) / (1.0 + power_per_beam * cross + primary);
}

}  // namespace detail

/// SINR of user i on beam j.
inline double sinr(Eigen::Index i, Eigen::Index j, const ComplexMatrix& forward, const ComplexMatrix& beams,
                   double power, const ComplexMatrix& primary_to_secondary, const HermitianMatrix& q_p) {
  if (!(power > 0.0)) throw std::invalid_argument("sinr: power must be positive");
  const Eigen::MatrixXd gains = beam_gains(forward.row(i), beams);
  const double primary = diag_quadratic(primary_to_secondary.row(i), q_p)(0);
  return detail::sinr_from_gains(gains, 0, j, power / static_cast<double>(beams.cols()), primary);
}

/// Max-SINR beam assignment on the given beams at the interference-capped
/// power. The rate is sum_j log(1 + max_i SINR_ij); one user may win several
/// beams.
inline BcOutcome assign_beams(const SystemConfig& cfg, const ChannelRealization& chan, ComplexMatrix beams) {
  if (cfg.secondary_mode != SecondaryMode::Broadcast)
    throw std::invalid_argument("assign_beams: secondary must be broadcast");
  const PowerCap cap = secondary_tx_power(chan.secondary_to_primary, cfg);
  const Eigen::MatrixXd gains = beam_gains(chan.forward, beams);
  const RealVector primary = diag_quadratic(chan.primary_to_secondary, primary_covariance(cfg));
  const double per_beam = cap.value / static_cast<double>(beams.cols());

  BcOutcome out;
  out.degenerate_rows = cap.degenerate_rows;
  out.schedule.power = cap.value;
  out.schedule.winners.resize(static_cast<std::size_t>(beams.cols()));
  for (Eigen::Index j = 0; j < beams.cols(); ++j) {
    BeamWinner best{-1, -1.0};
    for (Eigen::Index i = 0; i < gains.rows(); ++i) {
      const double s = detail::sinr_from_gains(gains, i, j, per_beam, primary(i));
      if (s > best.sinr) best = {i, s};
    }
    out.schedule.winners[static_cast<std::size_t>(j)] = best;
    out.rate += std::log1p(best.sinr);
  }
  out.schedule.beams = std::move(beams);
  return out;
}

/// Random beamforming with freshly drawn Haar beams.
inline BcOutcome assign_and_rate(const SystemConfig& cfg, const ChannelRealization& chan, RandomStream stream) {
  return assign_beams(cfg, chan, sample_haar_beams(stream.derive(stream_label::kBeams), cfg.secondary_antennas));
}

/// Rate recomputed from the schedule alone.
inline double bc_rate_from_winners(const BcSchedule& schedule) {
  double rate = 0.0;
  for (const auto& w : schedule.winners) rate += std::log1p(w.sinr);
  return rate;
}

/// Lower and upper ratio variables around the true SINR (all normalized by
/// power / m). theta = m q_p / power with q_p the per-stream primary power;
/// L <= SINR <= U whenever theta >= 1.
struct SinrSandwich {
  double lower = 0.0;
  double sinr = 0.0;
  double upper = 0.0;
  double theta = 0.0;
};

inline double sandwich_theta(const SystemConfig& cfg, double power) {
  return cfg.secondary_antennas * cfg.primary_stream_power() / power;
}

/// True when m q_p / P_s >= 1, so theta >= 1 for every realized power.
inline bool sandwich_regime(const SystemConfig& cfg) { return sandwich_theta(cfg, cfg.secondary_power) >= 1.0; }

namespace detail {

inline SinrSandwich sandwich_from_gains(const Eigen::MatrixXd& gains, Eigen::Index i, Eigen::Index j, double c,
                                        double theta, double cross_norm) {
  double others = 0.0;
  for (Eigen::Index k = 0; k < gains.cols(); ++k)
    if (k != j) others += gains(i, k);
  const double z = gains(i, j);
  return {z / (c + theta * (others + cross_norm)), z / (c + others + theta * cross_norm), z / (c + theta * cross_norm),
          theta};
}

}  // namespace detail

inline SinrSandwich sinr_sandwich(Eigen::Index i, Eigen::Index j, const SystemConfig& cfg,
                                  const ChannelRealization& chan, const ComplexMatrix& beams, double power) {
  if (!(power > 0.0)) throw std::invalid_argument("sinr_sandwich: power must be positive");
  const Eigen::MatrixXd gains = beam_gains(chan.forward.row(i), beams);
  const double c = cfg.secondary_antennas / power;
  return detail::sandwich_from_gains(gains, 0, j, c, sandwich_theta(cfg, power),
                                     chan.primary_to_secondary.row(i).squaredNorm());
}

/// Per-beam maxima over all users of L, SINR and U at a fixed power.
struct SandwichMaxima {
  double lower = 0.0;
  double sinr = 0.0;
  double upper = 0.0;
};

inline std::vector<SandwichMaxima> sandwich_maxima(const SystemConfig& cfg, const ChannelRealization& chan,
                                                   const ComplexMatrix& beams, double power) {
  const Eigen::MatrixXd gains = beam_gains(chan.forward, beams);
  const RealVector cross = chan.primary_to_secondary.rowwise().squaredNorm();
  const double c = cfg.secondary_antennas / power;
  const double theta = sandwich_theta(cfg, power);
  std::vector<SandwichMaxima> out(static_cast<std::size_t>(beams.cols()));
  for (Eigen::Index j = 0; j < beams.cols(); ++j) {
    SandwichMaxima best{0.0, 0.0, 0.0};
    for (Eigen::Index i = 0; i < gains.rows(); ++i) {
      const SinrSandwich s = detail::sandwich_from_gains(gains, i, j, c, theta, cross(i));
      best.lower = std::max(best.lower, s.lower);
      best.sinr = std::max(best.sinr, s.sinr);
      best.upper = std::max(best.upper, s.upper);
    }
    out[static_cast<std::size_t>(j)] = best;
  }
  return out;
}

/// Gamma_0 (log n)^{-q}, for 0 <= q < 1 and n >= 3.
inline double gamma_log_law(double gamma0, double q, std::int64_t n) {
  if (n <= 2) throw std::invalid_argument("gamma_log_law: n must be >= 3");
  if (!(gamma0 > 0.0) || !(q >= 0.0 && q < 1.0)) throw std::invalid_argument("gamma_log_law: need gamma0 > 0, 0 <= q < 1");
  return gamma0 * std::pow(std::log(static_cast<double>(n)), -q);
}

}  // namespace crn
