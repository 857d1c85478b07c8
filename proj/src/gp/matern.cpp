#include "sntl/gp/matern.hpp"

#include "sntl/error.hpp"
#include "sntl/numerics/bessel.hpp"

namespace sntl {

void MaternParams::validate() const {
  if (!(sigma2 > 0.0)) throw DomainError("matern: sigma2 must be positive");
  if (!(rho > 0.0)) throw DomainError("matern: rho must be positive");
  if (!(tau2 >= 0.0)) throw DomainError("matern: tau2 must be non-negative");
  if (nu != 1.0) throw DomainError("matern: only smoothness nu = 1 is implemented");
}

double matern_cov(double d, const MaternParams& p) {
  if (d < 0.0) throw DomainError("matern_cov: distance must be non-negative");
  if (d == 0.0) return p.sigma2;
  const double x = p.kappa() * d;
  // K1 underflows long before this matters; exp(-x) * sqrt(x) < 1e-300 here.
  if (x > 700.0) return 0.0;
  return p.sigma2 * x * bessel_k1(x);
}

SpdMatrix cov_matrix(std::span<const Location> locs, const MaternParams& p, bool include_nugget) {
  p.validate();
  const auto n = static_cast<Eigen::Index>(locs.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    c(j, j) = p.sigma2 + (include_nugget ? p.tau2 : 0.0);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = matern_cov(distance(locs[i], locs[j]), p);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return SpdMatrix(std::move(c));
}

Eigen::MatrixXd cross_cov(std::span<const Location> a, std::span<const Location> b,
                          const MaternParams& p) {
  p.validate();
  Eigen::MatrixXd c(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t j = 0; j < b.size(); ++j) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          matern_cov(distance(a[i], b[j]), p);
    }
  }
  return c;
}

GpSample sample_gp(std::span<const Location> locs, const MaternParams& p, RandomState& state) {
  const CholeskyFactor factor = cholesky(cov_matrix(locs, p, false));
  const auto n = static_cast<Eigen::Index>(locs.size());
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = state.next_standard_normal();
  GpSample out;
  out.signal = factor.lower().triangularView<Eigen::Lower>() * z;
  out.observed = out.signal;
  const double tau = std::sqrt(p.tau2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = state.next_standard_normal();
    if (p.tau2 > 0.0) out.observed[i] += tau * e;
  }
  return out;
}

}  // namespace sntl
