#include "sntl/numerics/linalg.hpp"

#include "sntl/error.hpp"

#include <cmath>
#include <string>

namespace sntl {

SpdMatrix::SpdMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) {
    throw DimensionMismatch("SpdMatrix: matrix is " + std::to_string(values_.rows()) + "x" +
                            std::to_string(values_.cols()));
  }
  const double scale = values_.cwiseAbs().maxCoeff();
  const Eigen::Index n = values_.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      if (std::abs(values_(i, j) - values_(j, i)) > 1e-12 * scale) {
        throw DomainError("SpdMatrix: input is not symmetric");
      }
    }
  }
}

CholeskyFactor::CholeskyFactor(Eigen::MatrixXd lower, double jitter)
    : lower_(std::move(lower)), jitter_(jitter) {}

Eigen::MatrixXd CholeskyFactor::reconstruct() const {
  return lower_ * lower_.transpose();
}

double CholeskyFactor::log_determinant() const {
  return 2.0 * lower_.diagonal().array().log().sum();
}

CholeskyFactor cholesky(const SpdMatrix& a, const JitterSchedule& schedule) {
  const Eigen::Index n = a.order();
  for (double jitter : schedule) {
    Eigen::MatrixXd work = a.values();
    work.diagonal().array() += jitter;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(work);
    if (llt.info() != Eigen::Success) continue;
    if (!(work.diagonal().array() > 0.0).all()) continue;
    work.triangularView<Eigen::StrictlyUpper>().setZero();
    return CholeskyFactor(std::move(work), jitter);
  }
  throw NotPositiveDefinite("cholesky: matrix of order " + std::to_string(n) +
                            " is not positive definite under any jitter in the schedule");
}

void lower_solve_in_place(const CholeskyFactor& factor, Eigen::Ref<Eigen::MatrixXd> b) {
  if (b.rows() != factor.order()) {
    throw DimensionMismatch("lower_solve: factor order " + std::to_string(factor.order()) +
                            ", right-hand side rows " + std::to_string(b.rows()));
  }
  factor.lower().triangularView<Eigen::Lower>().solveInPlace(b);
}

Eigen::MatrixXd spd_solve(const CholeskyFactor& factor, const Eigen::MatrixXd& b) {
  if (b.rows() != factor.order()) {
    throw DimensionMismatch("spd_solve: factor order " + std::to_string(factor.order()) +
                            ", right-hand side rows " + std::to_string(b.rows()));
  }
  Eigen::MatrixXd x = b;
  const auto lower = factor.lower().triangularView<Eigen::Lower>();
  lower.solveInPlace(x);
  lower.transpose().solveInPlace(x);
  return x;
}

Eigen::VectorXd spd_solve(const CholeskyFactor& factor, const Eigen::VectorXd& b) {
  return spd_solve(factor, Eigen::MatrixXd(b)).col(0);
}

}  // namespace sntl
