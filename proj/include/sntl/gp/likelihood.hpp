#pragma once

#include "sntl/basis.hpp"
#include "sntl/gp/matern.hpp"

#include <Eigen/Dense>

#include <span>

namespace sntl {

/// Gaussian log-likelihood of `observed` under Matern(p) plus nugget with the
/// constant mean replaced by its generalized-least-squares estimate.
/// Throws NotPositiveDefinite if the covariance cannot be factored.
double profile_log_likelihood(std::span<const Location> locs, const Eigen::VectorXd& observed,
                              const MaternParams& p);

/// Distance at which the binned empirical semivariogram first reaches 95% of
/// the sample variance; half the largest pairwise distance if it never does.
double empirical_variogram_range(std::span<const Location> locs, const Eigen::VectorXd& observed);

struct MaternFit {
  MaternParams params;
  double log_likelihood = 0.0;
  int converged_starts = 0;
};

struct FitOptions {
  int max_iterations = 500;
  double simplex_tolerance = 1e-4;
};

/// Maximum likelihood over (log sigma2, log rho, log tau2) with nu = 1, by
/// Nelder-Mead from three starts at half, one and two times the variogram
/// range. Throws PreconditionError for fewer than 5 points and FitFailed when
/// no start converges or the data have no spread.
MaternFit fit_matern_ml(std::span<const Location> locs, const Eigen::VectorXd& observed,
                        const FitOptions& options = {});

}  // namespace sntl
