#pragma once

#include "sntl/numerics/random.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace sntl {

/// Layer widths from input to output, e.g. {139, 100, ..., 100, 1}.
struct Architecture {
  std::vector<std::size_t> widths;

  /// Input, seven ReLU layers of 100 units, scalar output.
  static Architecture spatial_default(std::size_t input_dim = 139);

  std::size_t input_dim() const { return widths.front(); }
  std::size_t layer_count() const { return widths.size() - 1; }
  std::string describe() const;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct LayerParams {
  Eigen::MatrixXd weight;  // out_dim x in_dim
  Eigen::VectorXd bias;    // out_dim
};

/// Weights and biases of every layer. All layers but the last apply ReLU;
/// the output must be one unit wide. Also used for gradients and optimizer
/// moments, which share the shape.
struct NetworkParams {
  std::vector<LayerParams> layers;

  static NetworkParams zeros(const Architecture& arch);

  Architecture architecture() const;
  std::size_t parameter_count() const;
  /// Layer by layer: weight (column-major), then bias.
  Eigen::VectorXd flatten() const;
  void assign_flat(const Eigen::VectorXd& flat);

  friend bool operator==(const NetworkParams& a, const NetworkParams& b);
};

/// He initialization: weights ~ N(0, 2 / in_dim), biases 0. Weights are drawn
/// layer by layer in row-major order.
NetworkParams init_network(const Architecture& arch, RandomState& state);

/// Per-layer inputs and hidden pre-activations kept for backpropagation.
/// Column j of each matrix belongs to sample j of the batch.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;          // inputs[k] feeds layer k
  std::vector<Eigen::MatrixXd> pre_activations; // hidden layers only
};

/// x holds one sample per column (input_dim x batch). Throws DimensionMismatch.
Eigen::RowVectorXd forward_batch(const NetworkParams& params, const Eigen::MatrixXd& x,
                                 ForwardCache* cache = nullptr);

/// Accumulates sum_j dy[j] * d y_j / d theta into `grad` (overwritten).
/// ReLU's derivative at exactly zero is taken as zero.
void backward_batch(const NetworkParams& params, const ForwardCache& cache,
                    const Eigen::RowVectorXd& dy, NetworkParams& grad);

struct ForwardResult {
  double y = 0.0;
  ForwardCache cache;
};

ForwardResult forward(const NetworkParams& params, const Eigen::VectorXd& x);

/// Gradient of (y - target)^2 / 2 given residual = y - target.
NetworkParams backward(const NetworkParams& params, const ForwardCache& cache, double residual);

/// One prediction per row of `design` (n x input_dim).
Eigen::VectorXd predict(const NetworkParams& params, const Eigen::MatrixXd& design);

}  // namespace sntl
