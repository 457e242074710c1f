#pragma once

#include <cstdint>

namespace scanmix {

// Counter-based generator: output t of stream `key` is mix(key + t*gamma).
// Substreams derived with split() are independent of draw order in the
// parent, so per-block streams stay reproducible no matter how many draws
// any other block consumed.
struct CounterRng {
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

  std::uint64_t key = 0;
  std::uint64_t counter = 0;

  static std::uint64_t mix(std::uint64_t z) {
    z += kGamma;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  CounterRng() = default;
  explicit CounterRng(std::uint64_t seed) : key(mix(seed ^ 0x5ca19b5a7e8d3c1full)) {}

  std::uint64_t next() { return mix(key + kGamma * ++counter); }

  // Child stream for tag; never advances this stream.
  CounterRng split(std::uint64_t tag) const {
    CounterRng child;
    child.key = mix(key ^ mix(tag + 0xd1b54a32d192ed03ull));
    child.counter = 0;
    return child;
  }

  // Uniform draw from [0, n) by rejection; no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }
};

}  // namespace scanmix
