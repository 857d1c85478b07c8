#include "sntl/net/train.hpp"

#include "sntl/error.hpp"

#include <cmath>
#include <numeric>

namespace sntl {

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("train: epochs must be non-negative");
  if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be positive");
  if (batch_size == 0) throw ConfigError("train: batch_size must be positive");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("train: validation_fraction must lie in [0, 1)");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0)) {
    throw ConfigError("train: invalid Adam hyperparameters");
  }
}

void shuffle_indices(std::vector<Eigen::Index>& indices, RandomState& state) {
  for (std::size_t i = indices.size(); i > 1; --i) {
    // Rejection sampling keeps the draw exactly uniform on [0, i).
    const std::uint64_t bound = i;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
      r = state.next_u64();
    } while (r >= limit);
    std::swap(indices[i - 1], indices[r % bound]);
  }
}

double mean_squared_error(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth) {
  if (predicted.size() != truth.size()) throw DimensionMismatch("mse: lengths differ");
  if (predicted.size() == 0) throw EmptyDataset("mse: no values");
  return (predicted - truth).squaredNorm() / static_cast<double>(predicted.size());
}

TrainResult train(NetworkParams params, const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
                  const TrainConfig& cfg, RandomState& state) {
  cfg.validate();
  if (design.rows() == 0) throw EmptyDataset("train: no training rows");
  if (design.rows() != targets.size()) throw DimensionMismatch("train: design rows and targets differ");
  if (params.layers.empty() || design.cols() != params.layers.front().weight.cols()) {
    throw DimensionMismatch("train: design width does not match the network input");
  }

  const Eigen::Index n = design.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  auto n_val = static_cast<Eigen::Index>(std::floor(cfg.validation_fraction * static_cast<double>(n)));
  if (n_val >= n) n_val = n - 1;
  if (n_val > 0) shuffle_indices(order, state);
  std::vector<Eigen::Index> train_idx(order.begin(), order.end() - n_val);
  const std::vector<Eigen::Index> val_idx(order.end() - n_val, order.end());

  const Eigen::MatrixXd samples = design.transpose();  // one sample per column
  Eigen::MatrixXd val_design;
  Eigen::VectorXd val_targets;
  if (n_val > 0) {
    val_design = design(val_idx, Eigen::all);
    val_targets = targets(val_idx);
  }

  TrainResult result;
  result.trace.train_mse.reserve(static_cast<std::size_t>(cfg.epochs));
  AdamState adam = AdamState::fresh(params.architecture());
  const AdamConfig adam_cfg = cfg.adam();
  NetworkParams grad = NetworkParams::zeros(params.architecture());
  ForwardCache cache;
  Eigen::MatrixXd batch_x;
  Eigen::RowVectorXd batch_t;
  const auto batch = static_cast<Eigen::Index>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(train_idx, state);
    double sse = 0.0;
    const auto n_train = static_cast<Eigen::Index>(train_idx.size());
    for (Eigen::Index start = 0; start < n_train; start += batch) {
      const Eigen::Index len = std::min(batch, n_train - start);
      batch_x.resize(samples.rows(), len);
      batch_t.resize(len);
      for (Eigen::Index j = 0; j < len; ++j) {
        const Eigen::Index row = train_idx[static_cast<std::size_t>(start + j)];
        batch_x.col(j) = samples.col(row);
        batch_t[j] = targets[row];
      }
      const Eigen::RowVectorXd residual = forward_batch(params, batch_x, &cache) - batch_t;
      sse += residual.squaredNorm();
      backward_batch(params, cache, residual / static_cast<double>(len), grad);
      adam_step(params, grad, adam, adam_cfg);
    }
    result.trace.train_mse.push_back(sse / static_cast<double>(n_train));
    if (n_val > 0) {
      result.trace.validation_mse.push_back(mean_squared_error(predict(params, val_design), val_targets));
    }
  }
  result.params = std::move(params);
  return result;
}

}  // namespace sntl
