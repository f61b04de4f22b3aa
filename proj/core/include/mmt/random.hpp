#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>

namespace mmt {

using Seed = std::uint64_t;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Mixes a child label into a seed. Used to give every check, curve and
/// restart its own reproducible stream.
constexpr Seed derive_seed(Seed seed, std::uint64_t label) {
  return detail::splitmix64(detail::splitmix64(seed) ^ detail::splitmix64(label + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr Seed derive_seed(Seed seed, std::string_view label) { return derive_seed(seed, fnv1a64(label)); }

/// Counter-based generator: draw k of sample i is a pure function of
/// (seed, i, k). Monte Carlo loops construct one per sample, so results do not
/// depend on the order or thread in which samples are processed.
///
/// Normals use Box-Muller on our own uniforms; std::normal_distribution is
/// implementation-defined and would break cross-platform reproducibility.
class CounterRng {
 public:
  CounterRng(Seed seed, std::uint64_t sample)
      : key_(detail::splitmix64(seed ^ detail::splitmix64(sample * 0xd1b54a32d192ed03ULL + 1))) {}

  std::uint64_t next_u64() { return detail::splitmix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  void fill_normal(std::span<double> out) {
    for (double& v : out) v = normal();
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mmt
