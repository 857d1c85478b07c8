#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace sntl {

/// Seeded random stream.
///
/// The engine is std::mt19937_64, whose output sequence for a given 64-bit
/// seed is fixed by the C++ standard, so streams replay identically on every
/// conforming implementation. Uniforms take the top 53 bits of one engine
/// word; normals use the Box-Muller transform and return both variates of
/// each pair in order.
///
/// Child streams are keyed by a splitmix64 hash of (parent seed, stream id)
/// and do not depend on how many values the parent has already produced.
class RandomState {
 public:
  explicit RandomState(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  RandomState derive_child(std::uint64_t stream) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double next_uniform();
  double next_standard_normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

}  // namespace sntl
