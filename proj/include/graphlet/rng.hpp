#ifndef GRAPHLET_RNG_HPP
#define GRAPHLET_RNG_HPP

// Deterministic random number streams, version "graphlet-rng/1".
//
// Every random quantity in the library derives from a single 64-bit seed.
// Independent sub-streams (graph topology, signal matrix, regression weights,
// observation noise, train/test splits, per-trial seeds) are obtained with
// derive_seed(seed, stream_id); each sub-seed feeds its own mt19937_64 whose
// raw bits are mapped to doubles by the fixed conversions below. The scheme
// is fully specified, so identical seeds give identical output bytes on any
// conforming platform.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace graphlet {

inline constexpr const char* kRngVersion = "graphlet-rng/1";

namespace rng_stream {
inline constexpr std::uint64_t kGraph = 0;    // edge sampling
inline constexpr std::uint64_t kSignals = 1;  // raw signal matrix R
inline constexpr std::uint64_t kBeta = 2;     // regression weights
inline constexpr std::uint64_t kNoise = 3;    // additive observation noise
inline constexpr std::uint64_t kSplit = 4;    // train/test shuffles
inline constexpr std::uint64_t kTrials = 5;   // per-trial seed root
}  // namespace rng_stream

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(base + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0, 1]; never returns 0 so log() stays finite.
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  // P(true) == p exactly for the continuous uniform on (0, 1].
  bool bernoulli(double p) { return uniform01() <= p; }

  // Unbiased integer in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % bound;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace graphlet

#endif  // GRAPHLET_RNG_HPP
