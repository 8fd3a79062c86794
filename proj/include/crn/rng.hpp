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

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace crn {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as easy
// as 1, 2, 3"). Output is a pure function of (counter, key).
constexpr PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Immutable token naming one pseudorandom sequence. The sequence is a pure
/// function of (seed, stream_id); child streams are derived by hashing a label
/// into the id, never by advancing shared state.
struct RandomStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  [[nodiscard]] constexpr RandomStream derive(std::uint64_t label) const {
    return {seed, detail::splitmix64(stream_id ^ detail::splitmix64(label + 0x632BE59BD9B4E019ull))};
  }

  friend constexpr bool operator==(const RandomStream&, const RandomStream&) = default;
};

/// Sequential reader over a RandomStream. The Philox counter is
/// (block index, stream_id) and the key is the seed, so distinct stream ids
/// address disjoint counter ranges.
class StreamEngine {
 public:
  using result_type = std::uint32_t;

  explicit constexpr StreamEngine(RandomStream stream)
      : key_{static_cast<std::uint32_t>(stream.seed), static_cast<std::uint32_t>(stream.seed >> 32)},
        stream_id_(stream.stream_id) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }

  constexpr result_type operator()() {
    if (used_ == 4) refill();
    return buffer_[used_++];
  }

  constexpr std::uint64_t next_u64() {
    const std::uint64_t hi = (*this)();
    return (hi << 32) | (*this)();
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_positive() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), exact via rejection. bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

  /// Exp(1) by inversion.
  double exponential() { return -std::log(uniform_positive()); }

  /// CN(0,1): polar Box-Muller with radius sqrt(-ln u1) and phase 2*pi*u2, so
  /// real and imaginary parts are independent N(0, 1/2).
  std::complex<double> complex_normal() {
    const double radius = std::sqrt(-std::log(uniform_positive()));
    const double phase = 2.0 * std::numbers::pi * uniform();
    return {radius * std::cos(phase), radius * std::sin(phase)};
  }

  /// Gamma(shape, scale) for integer shape, as a sum of exponentials.
  double gamma_integer(int shape, double scale = 1.0) {
    double sum = 0.0;
    for (int i = 0; i < shape; ++i) sum += exponential();
    return sum * scale;
  }

 private:
  constexpr void refill() {
    buffer_ = detail::philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                     static_cast<std::uint32_t>(stream_id_),
                                     static_cast<std::uint32_t>(stream_id_ >> 32)},
                                    key_);
    ++block_;
    used_ = 0;
  }

  detail::PhiloxKey key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  detail::PhiloxBlock buffer_{};
  int used_ = 4;
};

}  // namespace crn
