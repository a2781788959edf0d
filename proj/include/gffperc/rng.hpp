#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace gffperc {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/// Key of a random substream. Children are derived by hashing the parent key
/// with a tag, so any (seed, replica, purpose, item) path names an independent
/// stream regardless of the order in which streams are created.
class StreamKey {
 public:
  constexpr StreamKey() = default;
  explicit constexpr StreamKey(std::uint64_t value) : value_(value) {}

  static StreamKey root(std::uint64_t seed) { return StreamKey(mix64(seed ^ 0x6a09e667f3bcc909ULL)); }
  StreamKey child(std::uint64_t tag) const {
    return StreamKey(mix64(value_ ^ mix64(tag + 0x9e3779b97f4a7c15ULL)));
  }
  std::uint64_t value() const { return value_; }

 private:
  std::uint64_t value_ = 0;
};

/// Stream purposes used when deriving keys.
enum class StreamTag : std::uint64_t {
  Field = 1,
  Edges = 2,
  Replica = 3,
  Oracle = 4,
};

inline StreamKey child(const StreamKey& k, StreamTag t) {
  return k.child(static_cast<std::uint64_t>(t));
}

/// xoshiro256** generator; satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(StreamKey key);
  explicit Rng(std::uint64_t seed) : Rng(StreamKey::root(seed)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace gffperc
