#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace hyperocc {

/// Independent random streams derived from one user seed, so that e.g. the
/// center draw and the projector init never share a sequence.
enum class Stream : std::uint64_t {
  Center = 1,
  ProjectorInit = 2,
  Shuffle = 3,
  Synth = 4,
  Subsample = 5,
};

/// Seedable, platform-independent generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Conversions to floating point (and the Box-Muller normal
/// transform) are implemented here because the standard distributions are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, Stream stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();
  /// Uniform in (0, 1].
  double uniform01_open_low() { return 1.0 - uniform01(); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();
  /// Unbiased integer in [0, n). n must be > 0.
  std::uint64_t index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace hyperocc
