#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace faircover {

/// Portable seeded generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The std:: distributions are implementation-defined, so every
/// conversion below is written out:
///   uniform01      (x >> 11) * 2^-53
///   below(n)       Lemire's multiply-shift with rejection
///   normal         Box-Muller, cosine branch only (one draw pair per value)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double low, double high) { return low + (high - low) * uniform01(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double exponential(double rate) { return -std::log(1.0 - uniform01()) / rate; }

  double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

 private:
  std::mt19937_64 engine_;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed for one buyer's stochastic solve; independent of batch scheduling.
constexpr std::uint64_t derive_buyer_seed(std::uint64_t seed, std::string_view buyer) {
  return splitmix64(seed ^ fnv1a64(buyer));
}

}  // namespace faircover
