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
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crn/linalg.hpp"

namespace crn {

/// Raised for scenario descriptions that violate their invariants.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class PrimaryMode { Broadcast, Mac };
enum class SecondaryMode { Mac, Broadcast };

inline std::string_view to_string(PrimaryMode mode) {
  return mode == PrimaryMode::Broadcast ? "broadcast" : "mac";
}
inline std::string_view to_string(SecondaryMode mode) {
  return mode == SecondaryMode::Broadcast ? "broadcast" : "mac";
}

/// Full scenario description. Powers are linear and relative to unit noise
/// variance; tolerance is the interference power each primary constraint
/// accepts.
struct SystemConfig {
  int primary_antennas = 2;         // M
  int primary_users = 2;            // N
  int secondary_antennas = 4;       // m
  std::int64_t secondary_users = 1000;  // n
  double primary_power = 5.0;       // P_p, primary broadcast total
  double primary_user_power = 5.0;  // rho_p, per primary MAC user
  double secondary_power = 5.0;     // P_s, secondary base station total
  double secondary_user_power = 5.0;  // rho_s, per secondary MAC user
  double tolerance = 2.0;           // Gamma
  // Optional per-constraint tolerances; empty means `tolerance` everywhere.
  std::vector<double> tolerances;
  PrimaryMode primary_mode = PrimaryMode::Broadcast;
  SecondaryMode secondary_mode = SecondaryMode::Mac;

  /// Number of interference constraints: N primary users or M primary antennas.
  [[nodiscard]] int constraint_count() const {
    return primary_mode == PrimaryMode::Broadcast ? primary_users : primary_antennas;
  }

  /// Number of primary transmit streams seen by the secondary receivers.
  [[nodiscard]] int primary_tx_dim() const {
    return primary_mode == PrimaryMode::Broadcast ? primary_antennas : primary_users;
  }

  /// Per-antenna (broadcast) or per-user (MAC) primary transmit power, i.e.
  /// the scale of the identity Q_p.
  [[nodiscard]] double primary_stream_power() const {
    return primary_mode == PrimaryMode::Broadcast ? primary_power / primary_antennas : primary_user_power;
  }

  [[nodiscard]] double tolerance_at(std::size_t constraint) const {
    return tolerances.empty() ? tolerance : tolerances.at(constraint);
  }

  /// The binding (smallest) tolerance across constraints.
  [[nodiscard]] double min_tolerance() const {
    return tolerances.empty() ? tolerance : *std::min_element(tolerances.begin(), tolerances.end());
  }

  void validate() const {
    if (primary_antennas < 1 || primary_users < 1 || secondary_antennas < 1)
      throw ConfigError("antenna and primary user counts must be >= 1");
    if (secondary_users < 1) throw ConfigError("secondary user count must be >= 1");
    const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(primary_power) || !positive(primary_user_power) || !positive(secondary_power) ||
        !positive(secondary_user_power))
      throw ConfigError("all powers must be positive and finite");
    if (!positive(tolerance)) throw ConfigError("interference tolerance must be positive");
    if (!tolerances.empty()) {
      if (static_cast<int>(tolerances.size()) != constraint_count())
        throw ConfigError("per-constraint tolerance list must have one entry per primary constraint");
      if (!std::all_of(tolerances.begin(), tolerances.end(), positive))
        throw ConfigError("per-constraint tolerances must be positive");
    }
  }
};

/// One block-fading draw.
///
/// Secondary MAC: H is m x n (column i = h_i), G_s is m x tx, G_p is K x n.
/// Secondary broadcast: H is n x m (row i = h_i^H), G_s is n x tx, G_p is K x m.
/// Here tx = M (primary broadcast) or N (primary MAC) and K is the number of
/// interference constraints.
struct ChannelRealization {
  ComplexMatrix forward;          // H
  ComplexMatrix primary_to_secondary;  // G_s
  ComplexMatrix secondary_to_primary;  // G_p
};

namespace stream_label {
inline constexpr std::uint64_t kForward = 1;
inline constexpr std::uint64_t kPrimaryToSecondary = 2;
inline constexpr std::uint64_t kSecondaryToPrimary = 3;
inline constexpr std::uint64_t kBeams = 4;
inline constexpr std::uint64_t kSelection = 5;
}  // namespace stream_label

/// G_p alone, identical to the matrix draw_channels would produce for the same
/// stream.
inline ComplexMatrix draw_secondary_to_primary(const SystemConfig& cfg, RandomStream stream) {
  const Eigen::Index k = cfg.constraint_count();
  const Eigen::Index cols =
      cfg.secondary_mode == SecondaryMode::Mac ? cfg.secondary_users : cfg.secondary_antennas;
  return sample_cn_matrix(stream.derive(stream_label::kSecondaryToPrimary), k, cols);
}

inline ChannelRealization draw_channels(const SystemConfig& cfg, RandomStream stream) {
  const Eigen::Index m = cfg.secondary_antennas;
  const Eigen::Index n = cfg.secondary_users;
  const Eigen::Index tx = cfg.primary_tx_dim();
  ChannelRealization chan;
  if (cfg.secondary_mode == SecondaryMode::Mac) {
    chan.forward = sample_cn_matrix(stream.derive(stream_label::kForward), m, n);
    chan.primary_to_secondary = sample_cn_matrix(stream.derive(stream_label::kPrimaryToSecondary), m, tx);
  } else {
    chan.forward = sample_cn_matrix(stream.derive(stream_label::kForward), n, m);
    chan.primary_to_secondary = sample_cn_matrix(stream.derive(stream_label::kPrimaryToSecondary), n, tx);
  }
  chan.secondary_to_primary = draw_secondary_to_primary(cfg, stream);
  return chan;
}

/// Q_p: rho_p I_N for a primary MAC, (P_p / M) I_M for a primary broadcast.
inline HermitianMatrix primary_covariance(const SystemConfig& cfg) {
  const Eigen::Index dim = cfg.primary_tx_dim();
  return HermitianMatrix::Identity(dim, dim) * Complex(cfg.primary_stream_power(), 0.0);
}

/// Entry l is [G_p Q_s G_p^H]_{l,l}, the interference power on primary
/// constraint l.
inline RealVector interference_on_primary(const ComplexMatrix& secondary_to_primary, const HermitianMatrix& q_s) {
  if (secondary_to_primary.cols() != q_s.rows())
    throw std::invalid_argument("interference_on_primary: G_p columns must match Q_s dimension");
  return diag_quadratic(secondary_to_primary, q_s).cwiseMax(0.0);
}

}  // namespace crn
