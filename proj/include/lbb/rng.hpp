#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>

namespace lbb {

/// 64-bit finalizer of the splitmix64 generator. Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// splitmix64 engine; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type(0); }
  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Identifies one reproducible stream of a master-seeded experiment.
struct RngSpec {
  std::uint64_t master_seed = 1;
  std::uint64_t stream_id = 0;
};

/// Counter-based substream mapping:
///   seed(master, stream, item) = mix64(mix64(mix64(master) ^ stream) ^ item)
/// Each stage is a bijection, so for a fixed master seed the map is injective
/// in `stream` for fixed `item` and injective in `item` for fixed `stream`.
/// Item engines are therefore independent of the order and partitioning in
/// which items are processed.
inline std::uint64_t substream_seed(const RngSpec& spec, std::uint64_t item) noexcept {
  return mix64(mix64(mix64(spec.master_seed) ^ spec.stream_id) ^ item);
}

inline SplitMix64 item_engine(const RngSpec& spec, std::uint64_t item) noexcept {
  return SplitMix64(substream_seed(spec, item));
}

/// Derives a child stream for a named sampling role (see `streams`).
inline RngSpec derived_stream(const RngSpec& spec, std::uint64_t tag) noexcept {
  return RngSpec{spec.master_seed, mix64(spec.stream_id ^ mix64(tag))};
}

/// Fixed role tags so different sampling loops never share a substream.
namespace streams {
inline constexpr std::uint64_t main_channel = 0x68;  // h draws
inline constexpr std::uint64_t eve_channel = 0x47;   // G draws
inline constexpr std::uint64_t location = 0x4c;      // estimated-location draws
inline constexpr std::uint64_t sphere = 0x53;        // unit-sphere beamformers
inline constexpr std::uint64_t mixed = 0x4d;         // joint (h, G) draws
inline constexpr std::uint64_t antenna = 0x4e00;     // + antenna count, per-curve streams
}  // namespace streams

/// Uniform double in the open interval (0, 1).
inline double uniform_unit(SplitMix64& g) noexcept {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1p-53;
}

/// Box-Muller pair of independent standard normals.
inline std::pair<double, double> normal_pair(SplitMix64& g) noexcept {
  constexpr double tau = 6.28318530717958647692;
  const double u1 = uniform_unit(g);
  const double u2 = uniform_unit(g);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(tau * u2), r * std::sin(tau * u2)};
}

/// Circularly-symmetric complex Gaussian CN(0,1): real and imaginary parts are
/// independent N(0, 1/2).
inline std::complex<double> complex_normal(SplitMix64& g) noexcept {
  const auto [z0, z1] = normal_pair(g);
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  return {z0 * inv_sqrt2, z1 * inv_sqrt2};
}

}  // namespace lbb
