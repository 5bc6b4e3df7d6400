#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace smarty {

/// splitmix64 finalizer, used to mix seeds and derive substream keys.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic random stream. The engine is std::mt19937_64 (bit-exact by
/// the standard) and every variate below is produced with a fixed draw
/// pattern, so a given (seed, stream id) reproduces the same sequence on any
/// platform and under any thread schedule.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(mix64(seed)) {}

  /// Independent substream keyed by (seed, a, b). Used to make per-event /
  /// per-individual streams so parallel evaluation order cannot matter.
  static Rng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return Rng(mix64(mix64(mix64(seed) ^ a) ^ b));
  }

  std::uint64_t next() { return eng_(); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log() argument.
  double uniform01_open0() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi], both inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }

  /// Standard normal via Box-Muller. No cached spare: two draws per call,
  /// keeping the stream position independent of call history.
  double gauss() {
    const double u1 = uniform01_open0();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double exponential(double mean) { return -mean * std::log(uniform01_open0()); }

 private:
  std::mt19937_64 eng_;
};

/// FWHM of a Gaussian to its standard deviation: FWHM = 2*sqrt(2 ln 2)*sigma.
inline double fwhm_to_sigma(double fwhm) {
  return fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

}  // namespace smarty
