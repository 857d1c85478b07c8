#pragma once

#include "sntl/basis.hpp"
#include "sntl/gp/matern.hpp"
#include "sntl/numerics/linalg.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace sntl {

/// Ordinary Kriging with an unknown constant mean.
///
/// The weights for a target s0 solve the bordered system
///   [C + tau2 I  1] [w ]   [c0]
///   [1^T         0] [mu] = [1 ]
/// where c0 holds nugget-free covariances, so predictions target the signal
/// rather than a fresh noisy observation.
class KrigingModel {
 public:
  /// Throws DimensionMismatch when the lengths differ and PreconditionError
  /// for an empty training set.
  KrigingModel(std::vector<Location> locations, Eigen::VectorXd observed, MaternParams params);

  const MaternParams& params() const { return params_; }
  const std::vector<Location>& locations() const { return locations_; }
  const CholeskyFactor& factor() const { return factor_; }
  /// Generalized-least-squares estimate of the constant mean.
  double mean() const { return mean_; }

  /// Weights applied to the training observations for one target; they sum to one.
  Eigen::VectorXd weights(const Location& target) const;
  Eigen::VectorXd predict(std::span<const Location> targets) const;

 private:
  std::vector<Location> locations_;
  Eigen::VectorXd observed_;
  MaternParams params_;
  CholeskyFactor factor_;
  Eigen::VectorXd inv_ones_;      // (C + tau2 I)^-1 1
  double ones_inv_ones_ = 0.0;    // 1^T (C + tau2 I)^-1 1
  Eigen::VectorXd inv_residual_;  // (C + tau2 I)^-1 (y - mean)
  double mean_ = 0.0;
};

inline Eigen::VectorXd krige_predict(const KrigingModel& model, std::span<const Location> targets) {
  return model.predict(targets);
}

}  // namespace sntl
