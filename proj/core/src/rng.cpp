#include "robust_scale/rng.hpp"

#include <cmath>

namespace robust_scale {

namespace {

constexpr std::uint32_t kPhiloxMult0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxMult0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxMult1) * ctr[2];
  ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
         static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
         static_cast<std::uint32_t>(p0)};
}

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::uint64_t stream, std::uint64_t counter) const {
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t k0 = key0_;
  std::uint32_t k1 = key1_;
  philox_round(ctr, k0, k1);
  for (int round = 1; round < 10; ++round) {
    k0 += kPhiloxWeyl0;
    k1 += kPhiloxWeyl1;
    philox_round(ctr, k0, k1);
  }
  return ctr;
}

std::uint64_t derive_substream(std::uint64_t purpose, std::uint64_t n, std::uint64_t shard) {
  return splitmix64(splitmix64(splitmix64(purpose) ^ n) ^ shard);
}

std::uint64_t RandomStream::next_u64() {
  if (buf_pos_ >= 2) {
    buf_ = prng_.block(stream_, counter_++);
    buf_pos_ = 0;
  }
  const int base = 2 * buf_pos_++;
  return static_cast<std::uint64_t>(buf_[base]) |
         (static_cast<std::uint64_t>(buf_[base + 1]) << 32);
}

double RandomStream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::next_normal() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_normal_;
  }
  // Trigonometric Box-Muller; u1 shifted into (0, 1] so the log is finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = kTwoPi * u2;
  cached_normal_ = radius * std::sin(angle);
  have_cached_ = true;
  return radius * std::cos(angle);
}

void RandomStream::fill_normal(std::span<double> out) {
  for (double& value : out) value = next_normal();
}

}  // namespace robust_scale
