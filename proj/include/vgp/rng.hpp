#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace vgp {

/// Seeded random stream. The engine is std::mt19937_64, whose output sequence is
/// fixed by the C++ standard; the conversions to floating point below are written
/// out here because std distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n), n > 0, unbiased.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal by Box-Muller.
  double normal();
  /// Complex normal with E|w|^2 = 1.
  std::complex<double> complex_normal();

  /// Independent child stream derived from this seed and a stream index.
  static Rng stream(std::uint64_t seed, std::uint64_t index);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finalizer, used to decorrelate derived seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace vgp
