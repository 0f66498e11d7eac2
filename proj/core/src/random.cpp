// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtbs/random.hpp"

namespace wtbs {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;
constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

} // namespace

PhiloxCounter philox4x32(PhiloxCounter c, PhiloxKey k) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMulA, c[0], hi0, lo0);
    mulhilo(kMulB, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeylA;
    k[1] += kWeylB;
  }
  return c;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) noexcept {
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint32_t word1, std::uint32_t word2,
                           std::uint32_t word3) noexcept
    : counter_{0, word1, word2, word3},
      key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

RandomStream RandomStream::for_link(std::uint64_t seed, std::uint32_t row, std::uint32_t col,
                                    std::uint32_t iteration, std::uint64_t site_key) noexcept {
  // Cell coordinates share one counter word; the upper half of the site key
  // is folded into the key so distinct sites collide only on a full 64-bit match.
  const std::uint32_t cell = (row << 16) ^ (col & 0xFFFFu) ^ ((col >> 16) * 0x9E3779B9u);
  const std::uint64_t key = seed ^ (site_key & 0xFFFFFFFF00000000ULL);
  return RandomStream(key, iteration, cell, static_cast<std::uint32_t>(site_key));
}

RandomStream::result_type RandomStream::operator()() noexcept {
  if (used_ == 4) {
    block_ = philox4x32(counter_, key_);
    ++counter_[0];
    used_ = 0;
  }
  return block_[used_++];
}

} // namespace wtbs
