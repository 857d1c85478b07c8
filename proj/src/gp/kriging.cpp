#include "sntl/gp/kriging.hpp"

#include "sntl/error.hpp"

namespace sntl {
namespace {

CholeskyFactor factor_training(const std::vector<Location>& locations, const Eigen::VectorXd& observed,
                               const MaternParams& params) {
  if (locations.empty()) throw PreconditionError("kriging: empty training set");
  if (observed.size() != static_cast<Eigen::Index>(locations.size())) {
    throw DimensionMismatch("kriging: " + std::to_string(locations.size()) + " locations but " +
                            std::to_string(observed.size()) + " observations");
  }
  return cholesky(cov_matrix(locations, params, true));
}

}  // namespace

KrigingModel::KrigingModel(std::vector<Location> locations, Eigen::VectorXd observed,
                           MaternParams params)
    : locations_(std::move(locations)),
      observed_(std::move(observed)),
      params_(params),
      factor_(factor_training(locations_, observed_, params_)) {
  inv_ones_ = spd_solve(factor_, Eigen::VectorXd::Ones(observed_.size()).eval());
  ones_inv_ones_ = inv_ones_.sum();
  mean_ = inv_ones_.dot(observed_) / ones_inv_ones_;
  inv_residual_ = spd_solve(factor_, (observed_.array() - mean_).matrix().eval());
}

Eigen::VectorXd KrigingModel::weights(const Location& target) const {
  const Eigen::VectorXd c0 = cross_cov(locations_, std::span(&target, 1), params_).col(0);
  const Eigen::VectorXd inv_c0 = spd_solve(factor_, c0);
  const double lagrange = (1.0 - inv_ones_.dot(c0)) / ones_inv_ones_;
  return inv_c0 + lagrange * inv_ones_;
}

Eigen::VectorXd KrigingModel::predict(std::span<const Location> targets) const {
  // w^T y = mean + c0^T (C + tau2 I)^-1 (y - mean 1) for the bordered-system weights.
  const Eigen::MatrixXd c0 = cross_cov(targets, locations_, params_);
  return (c0 * inv_residual_).array() + mean_;
}

}  // namespace sntl
