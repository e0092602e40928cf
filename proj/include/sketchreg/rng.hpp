#pragma once

#include <cstdint>
#include <random>

namespace sketchreg {

/// Mixes a 64-bit value; used to derive independent seeds from (seed, stream).
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of stream `stream` under root seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded generator with platform-independent draws.
///
/// Raw bits come from std::mt19937_64, whose output sequence is fixed by the
/// standard. Uniform and normal variates are computed here rather than with the
/// <random> distributions, whose algorithms are implementation-defined.
/// An Rng is not shareable between tasks; use split() to hand out streams.
class Rng {
public:
  static constexpr const char* algorithm = "mt19937_64/splitmix64";

  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Unbiased integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  /// +1 or -1 with equal probability.
  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }
  /// Standard normal via Box-Muller.
  double normal();

  /// Independent generator for child stream `k`.
  Rng split(std::uint64_t k) const { return Rng(derive_seed(seed_, stream_), k); }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace sketchreg
