#pragma once

#include <array>
#include <cstdint>

namespace percolade {

// Philox4x32-10 counter-based generator. A (key, counter) pair maps to four
// 32-bit words through ten rounds of multiply-xor mixing; distinct counters
// give independent outputs, so any draw can be replayed out of order.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Key key, Counter ctr) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      ctr = mix(ctr, key);
    }
    return ctr;
  }

 private:
  static Counter mix(const Counter& ctr, const Key& key) {
    const std::uint64_t prod0 = std::uint64_t{0xD2511F53u} * ctr[0];
    const std::uint64_t prod1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
    return {static_cast<std::uint32_t>(prod1 >> 32) ^ ctr[1] ^ key[0],
            static_cast<std::uint32_t>(prod1),
            static_cast<std::uint32_t>(prod0 >> 32) ^ ctr[3] ^ key[1],
            static_cast<std::uint32_t>(prod0)};
  }
};

// Stream classes partition the counter space so unrelated consumers of one
// master seed can never collide.
enum class StreamClass : std::uint32_t {
  DfsQueries = 1,       // layer 1: one stream per block, draws in query order
  Sprinkle = 2,         // layer 2: one draw per edge id
  FullPercolation = 3,  // eager percolation: one draw per edge id
  TrialSeed = 4,        // per-trial sub-seeds
  Generator = 5,        // graph generators
  Sampler = 6,          // sampled certification
  Baseline = 7,         // unmodified DFS baseline, one draw per edge id
};

// Stateless draw at an absolute position. `index` must stay below 2^32.
namespace draw {

inline std::uint64_t value64(std::uint64_t seed, StreamClass cls, std::uint64_t stream,
                             std::uint64_t index) {
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                            static_cast<std::uint32_t>(seed >> 32)};
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(cls),
                                static_cast<std::uint32_t>(stream),
                                static_cast<std::uint32_t>(stream >> 32),
                                static_cast<std::uint32_t>(index)};
  const auto out = Philox4x32::block(key, ctr);
  return (std::uint64_t{out[0]} << 32) | out[1];
}

// Uniform in [0, 1) with 53 random bits; exact at p = 0 and p = 1.
inline double unit(std::uint64_t seed, StreamClass cls, std::uint64_t stream,
                   std::uint64_t index) {
  return static_cast<double>(value64(seed, cls, stream, index) >> 11) * 0x1.0p-53;
}

inline bool bernoulli(double p, std::uint64_t seed, StreamClass cls, std::uint64_t stream,
                      std::uint64_t index) {
  return unit(seed, cls, stream, index) < p;
}

}  // namespace draw

// Sequential view over one stream, for shuffles and sampling loops.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamClass cls, std::uint64_t stream)
      : seed_(seed), cls_(cls), stream_(stream) {}

  std::uint64_t next_u64() { return draw::value64(seed_, cls_, stream_, index_++); }

  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound) by rejection; exact for any bound > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t max64 = ~std::uint64_t{0};
    const std::uint64_t rem = (max64 % bound + 1) % bound;  // 2^64 mod bound
    std::uint64_t x = next_u64();
    while (rem != 0 && x > max64 - rem) x = next_u64();
    return x % bound;
  }

 private:
  std::uint64_t seed_;
  StreamClass cls_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
};

}  // namespace percolade
