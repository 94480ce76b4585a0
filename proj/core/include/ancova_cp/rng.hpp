#pragma once

// Counter-based random streams. Each (seed, point, purpose, chunk) tuple maps
// to its own Philox4x32-10 stream, so chunks can be simulated in any order or
// on any thread and still reproduce the same numbers.

#include <array>
#include <cstdint>
#include <limits>

namespace ancova_cp::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Philox4x32 with 10 rounds. Satisfies
/// UniformRandomBitGenerator with 32-bit output.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t key, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (index_ == 4) {
      buffer_ = bijection({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                           static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                          key_);
      ++block_;
      index_ = 0;
    }
    return buffer_[index_++];
  }

  /// The keyed bijection on 128-bit counters.
  static constexpr Block bijection(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9U;
        key[1] += 0xBB67AE85U;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53U} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57U} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int index_ = 4;
};

/// Tags that keep the estimators' streams disjoint at equal seed and point.
enum class Purpose : std::uint64_t {
  Naive = 1,
  Conditioned = 2,
  Gate = 3,
  SelectionGap = 4,
  RawOracle = 5,
};

inline Philox4x32 make_stream(std::uint64_t seed, std::uint64_t point_hash, Purpose purpose, std::uint64_t chunk) {
  const std::uint64_t key =
      splitmix64(seed ^ splitmix64(point_hash ^ splitmix64(static_cast<std::uint64_t>(purpose))));
  return Philox4x32(key, chunk);
}

}  // namespace ancova_cp::rng
