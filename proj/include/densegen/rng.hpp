#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace densegen {

/// SplitMix64 generator. The update sequence is fixed by the constants
/// below so that reports produced under a given seed are reproducible
/// across platforms and builds:
///   x += 0x9E3779B97F4A7C15
///   z  = x; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; consumes exactly two draws per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform on the closed unit disc (complex) by rejection.
  std::complex<double> unit_disc() {
    for (;;) {
      double re = uniform(-1.0, 1.0);
      double im = uniform(-1.0, 1.0);
      if (re * re + im * im <= 1.0) return {re, im};
    }
  }

  /// Derive an independent stream (for sample-parallel work).
  SplitMix64 split() { return SplitMix64(next_u64()); }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace densegen
