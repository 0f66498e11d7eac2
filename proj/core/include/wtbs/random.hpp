// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace wtbs {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11). Pure function of
/// (counter, key); the basis of every random draw in the simulator.
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key) noexcept;

/// 64-bit FNV-1a; used for stream keys and input fingerprints.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept;

/// Counter-based random stream. Every (seed, row, col, iteration, site) tuple
/// owns a disjoint stream, so draws never depend on evaluation order or on
/// which other sites are present.
///
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
public:
  using result_type = std::uint32_t;

  RandomStream(std::uint64_t seed, std::uint32_t word1, std::uint32_t word2,
               std::uint32_t word3) noexcept;

  /// Stream for one site's draws in one Monte Carlo iteration of one cell.
  static RandomStream for_link(std::uint64_t seed, std::uint32_t row, std::uint32_t col,
                               std::uint32_t iteration, std::uint64_t site_key) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1), 32-bit resolution.
  double uniform() noexcept { return (static_cast<double>((*this)()) + 0.5) * 0x1p-32; }

private:
  PhiloxCounter counter_;
  PhiloxKey key_;
  PhiloxCounter block_{};
  unsigned used_ = 4;
};

} // namespace wtbs
