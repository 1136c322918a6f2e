#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// A draw is a pure function of (key, counter), so ensemble members can be
// stepped in any order or on any thread and still see the same numbers.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace lael::rng {

using Block = std::array<std::uint32_t, 4>;

inline Block philox4x32(Block ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t(m0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(m1) * ctr[2];
    ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
           std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
    key[0] += w0;
    key[1] += w1;
  }
  return ctr;
}

/// Uniform in (0, 1) from 32 random bits; never returns 0.
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t(hi) << 21) ^ (lo >> 11);
  return (double(bits & ((std::uint64_t(1) << 53) - 1)) + 0.5) * 0x1p-53;
}

/// Two independent standard normals for the stream (seed, a, b, c).
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint32_t a,
                                         std::uint32_t b, std::uint32_t c) {
  const Block r = philox4x32(
      {a, b, c, 0u}, {std::uint32_t(seed), std::uint32_t(seed >> 32)});
  const double u1 = to_unit(r[0], r[1]);
  const double u2 = to_unit(r[2], r[3]);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  return {rad * std::cos(th), rad * std::sin(th)};
}

/// Single standard normal keyed by (seed, a, b, c).
inline double normal(std::uint64_t seed, std::uint32_t a, std::uint32_t b,
                     std::uint32_t c) {
  return normal_pair(seed, a, b, c)[0];
}

/// Sequential stream over one key, handy for non-parallel draws.
class Stream {
public:
  Stream(std::uint64_t seed, std::uint32_t stream)
      : seed_(seed), stream_(stream) {}
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const auto p = normal_pair(seed_, stream_, std::uint32_t(count_),
                               std::uint32_t(count_ >> 32));
    ++count_;
    spare_ = p[1];
    have_spare_ = true;
    return p[0];
  }
  double uniform() {
    const Block r = philox4x32(
        {stream_, std::uint32_t(count_), std::uint32_t(count_ >> 32), 1u},
        {std::uint32_t(seed_), std::uint32_t(seed_ >> 32)});
    ++count_;
    return to_unit(r[0], r[1]);
  }

private:
  std::uint64_t seed_;
  std::uint32_t stream_;
  std::uint64_t count_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

} // namespace lael::rng
