#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace robust_scale {

// Philox4x32-10 counter-based generator keyed by a 64-bit seed. Every
// (stream, block) pair maps to 128 output bits through a fixed bijection,
// so any number of logical substreams can be drawn from one seed without
// coordination between them. Output matches the published Philox4x32-10
// test vectors (see the unit tests).
class Philox4x32 {
 public:
  explicit Philox4x32(std::uint64_t seed)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)) {}

  // counter = (block lo, block hi, stream lo, stream hi)
  std::array<std::uint32_t, 4> block(std::uint64_t stream, std::uint64_t counter) const;

 private:
  std::uint32_t key0_;
  std::uint32_t key1_;
};

// Stable substream id for a (purpose, n, shard) work unit; splitmix64 chain.
std::uint64_t derive_substream(std::uint64_t purpose, std::uint64_t n, std::uint64_t shard);

// One logical random stream: a deterministic sequence of draws fully
// determined by (seed, stream id). Normal deviates use the trigonometric
// Box-Muller transform; this choice is frozen so that identical seeds
// reproduce identical sequences.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : prng_(seed), stream_(stream) {}

  std::uint64_t next_u64();
  double next_uniform();  // [0, 1), 53-bit resolution
  double next_normal();   // N(0, 1)
  void fill_normal(std::span<double> out);

 private:
  Philox4x32 prng_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 2;  // in u64 units; 2 == exhausted
  double cached_normal_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace robust_scale
