#pragma once

#include "sntl/basis.hpp"
#include "sntl/numerics/linalg.hpp"
#include "sntl/numerics/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <span>

namespace sntl {

/// Matern covariance parameters. Only smoothness nu = 1 is supported, where
/// C(d) = sigma2 * (kappa d) * K1(kappa d) with kappa = sqrt(8) / rho.
struct MaternParams {
  double sigma2 = 1.0;
  double nu = 1.0;
  double rho = 0.2;
  double tau2 = 0.01;

  double kappa() const { return std::sqrt(8.0) / rho; }
  /// Throws DomainError when a field is out of range or nu != 1.
  void validate() const;
};

/// C(0) = sigma2 exactly; the Bessel function is only evaluated for d > 0.
double matern_cov(double d, const MaternParams& p);

SpdMatrix cov_matrix(std::span<const Location> locs, const MaternParams& p, bool include_nugget);

/// Rows follow `a`, columns follow `b`; never includes the nugget.
Eigen::MatrixXd cross_cov(std::span<const Location> a, std::span<const Location> b,
                          const MaternParams& p);

struct GpSample {
  Eigen::VectorXd signal;
  Eigen::VectorXd observed;
};

/// signal = L z with L the factor of the nugget-free covariance; observed adds
/// independent N(0, tau2) noise. The first locs.size() normals feed z, the
/// next locs.size() feed the noise.
GpSample sample_gp(std::span<const Location> locs, const MaternParams& p, RandomState& state);

}  // namespace sntl
