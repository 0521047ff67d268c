#pragma once

#include <cstdint>
#include <string_view>

namespace properdiv {

// splitmix64 step: advances the state and returns a mixed 64-bit word.
constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t s = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 12) + (a >> 4));
  return splitmix64_next(s);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Counter-based random substream keyed by (seed, stream, replicate).
/// The n-th draw depends only on the key and n, so replicates can run on
/// any number of workers and still produce bit-identical output.
class Substream {
 public:
  Substream(std::uint64_t seed, std::uint64_t stream,
            std::uint64_t replicate) noexcept
      : state_(mix_keys(mix_keys(seed, stream), replicate)) {}

  std::uint64_t next_u64() noexcept {
    ++draws_;
    return splitmix64_next(state_);
  }

  /// Uniform draw in [0, 1).
  double uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::uint64_t state_;
  std::uint64_t draws_ = 0;
};

}  // namespace properdiv
