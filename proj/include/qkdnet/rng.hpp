#pragma once

#include <cstdint>
#include <random>

namespace qkdnet {

/// SplitMix64 finalizer. Used only to derive well-scattered seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Substream domains. Each (domain, index...) tuple owns an independent
/// random stream, so adding subnets, users or combos never perturbs the
/// randomness of the existing ones.
enum class Stream : std::uint64_t {
  Emission = 1,   // per (combo)
  Transport = 2,  // per (combo)
  Detector = 3,   // per (subnet, user, arm)
  Relay = 4,      // central-node local key material
  Test = 99,
};

/// Deterministic random source. One instance per substream; never shared
/// across threads.
class Rng {
public:
  explicit Rng(std::uint64_t seed) {
    std::seed_seq seq{splitmix64(seed), splitmix64(seed + 1), splitmix64(seed + 2),
                      splitmix64(seed + 3)};
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }

  /// Uniform integer in [0, n).
  std::uint32_t uniform_int(std::uint32_t n) {
    return std::uniform_int_distribution<std::uint32_t>(0, n - 1)(engine_);
  }

  /// Zero-mean Gaussian. sigma == 0 short-circuits to 0 without consuming state.
  double gaussian(double sigma) {
    if (sigma == 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, sigma)(engine_);
  }

  /// Exponential with the given mean. mean must be > 0.
  double exponential(double mean) {
    return std::exponential_distribution<double>(1.0 / mean)(engine_);
  }

private:
  std::mt19937_64 engine_;
};

/// Counter-scheme substream derivation: the master seed and the
/// (domain, a, b, c) coordinates are folded through SplitMix64 chaining.
inline Rng substream(std::uint64_t master, Stream domain, std::uint64_t a = 0,
                     std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t k = splitmix64(master);
  k = splitmix64(k ^ static_cast<std::uint64_t>(domain));
  k = splitmix64(k ^ a);
  k = splitmix64(k ^ b);
  k = splitmix64(k ^ c);
  return Rng(k);
}

}  // namespace qkdnet
