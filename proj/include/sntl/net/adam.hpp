#pragma once

#include "sntl/net/network.hpp"

#include <cstdint>

namespace sntl {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  NetworkParams first_moment;
  NetworkParams second_moment;
  std::uint64_t step = 0;

  static AdamState fresh(const Architecture& arch);
};

/// Bias-corrected Adam update of every weight and bias. Throws
/// DimensionMismatch if the shapes disagree.
void adam_step(NetworkParams& params, const NetworkParams& grad, AdamState& state, const AdamConfig& cfg);

}  // namespace sntl
