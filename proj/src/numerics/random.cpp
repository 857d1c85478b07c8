#include "sntl/numerics/random.hpp"

#include <cmath>
#include <numbers>

namespace sntl {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomState::RandomState(std::uint64_t seed) : seed_(seed), engine_(seed) {}

RandomState RandomState::derive_child(std::uint64_t stream) const {
  return RandomState(mix64(seed_ ^ mix64(stream ^ 0x5851f42d4c957f2dULL)));
}

std::uint64_t RandomState::next_u64() { return engine_(); }

double RandomState::next_uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomState::next_standard_normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  // 1 - u lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - next_uniform();
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

}  // namespace sntl
