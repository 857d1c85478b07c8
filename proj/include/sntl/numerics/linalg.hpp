#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace sntl {

/// Dense symmetric matrix intended to be positive definite.
/// Construction rejects non-square or visibly asymmetric input
/// (relative asymmetry above 1e-12).
class SpdMatrix {
 public:
  explicit SpdMatrix(Eigen::MatrixXd values);

  Eigen::Index order() const { return values_.rows(); }
  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

 private:
  Eigen::MatrixXd values_;
};

/// Absolute diagonal jitters tried in order until a factorization succeeds.
using JitterSchedule = std::vector<double>;

inline JitterSchedule default_jitter_schedule() { return {0.0, 1e-12, 1e-10, 1e-8}; }

/// Lower-triangular L with L * L^T = A + jitter * I.
class CholeskyFactor {
 public:
  CholeskyFactor(Eigen::MatrixXd lower, double jitter);

  Eigen::Index order() const { return lower_.rows(); }
  const Eigen::MatrixXd& lower() const { return lower_; }
  double jitter() const { return jitter_; }

  Eigen::MatrixXd reconstruct() const;
  double log_determinant() const;

 private:
  Eigen::MatrixXd lower_;
  double jitter_;
};

/// Throws NotPositiveDefinite when every jitter in the schedule fails.
CholeskyFactor cholesky(const SpdMatrix& a,
                        const JitterSchedule& schedule = default_jitter_schedule());

/// Solves (L L^T) x = b. Throws DimensionMismatch.
Eigen::VectorXd spd_solve(const CholeskyFactor& factor, const Eigen::VectorXd& b);
Eigen::MatrixXd spd_solve(const CholeskyFactor& factor, const Eigen::MatrixXd& b);

/// Solves L x = b in place (forward substitution only).
void lower_solve_in_place(const CholeskyFactor& factor, Eigen::Ref<Eigen::MatrixXd> b);

}  // namespace sntl
