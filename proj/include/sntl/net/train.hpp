#pragma once

#include "sntl/net/adam.hpp"
#include "sntl/net/network.hpp"
#include "sntl/numerics/random.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace sntl {

struct TrainConfig {
  int epochs = 1000;
  double learning_rate = 0.001;
  std::size_t batch_size = 64;
  double validation_fraction = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon}; }
  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

/// Per-epoch mean squared errors. Training MSE is averaged over the batches
/// seen during the epoch; validation MSE is evaluated after the epoch and is
/// empty when no validation split was held out.
struct TrainTrace {
  std::vector<double> train_mse;
  std::vector<double> validation_mse;
};

struct TrainResult {
  NetworkParams params;
  TrainTrace trace;
};

/// Mini-batch Adam on the loss mean((y - target)^2) / 2, starting from
/// `params`. The validation split (a random fraction, drawn first) is never
/// trained on. Zero epochs returns `params` unchanged.
///
/// Throws EmptyDataset for zero rows and DimensionMismatch when the design,
/// targets and network disagree.
TrainResult train(NetworkParams params, const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
                  const TrainConfig& cfg, RandomState& state);

/// Fisher-Yates shuffle driven by `state`; identical on every platform.
void shuffle_indices(std::vector<Eigen::Index>& indices, RandomState& state);

double mean_squared_error(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth);

}  // namespace sntl
