#include "sntl/gp/likelihood.hpp"

#include "sntl/error.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

namespace sntl {

double profile_log_likelihood(std::span<const Location> locs, const Eigen::VectorXd& observed,
                              const MaternParams& p) {
  const auto n = static_cast<Eigen::Index>(locs.size());
  if (observed.size() != n) throw DimensionMismatch("likelihood: locations and observations differ");
  const CholeskyFactor factor = cholesky(cov_matrix(locs, p, true));
  Eigen::MatrixXd rhs(n, 2);
  rhs.col(0) = observed;
  rhs.col(1).setOnes();
  const Eigen::MatrixXd solved = spd_solve(factor, rhs);
  const double mean = solved.col(0).sum() / solved.col(1).sum();
  const Eigen::VectorXd resid_solved = solved.col(0) - mean * solved.col(1);
  const double quad = (observed.array() - mean).matrix().dot(resid_solved);
  return -0.5 * (factor.log_determinant() + quad + n * std::log(2.0 * std::numbers::pi));
}

double empirical_variogram_range(std::span<const Location> locs, const Eigen::VectorXd& observed) {
  const std::size_t n = locs.size();
  double max_d = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) max_d = std::max(max_d, distance(locs[i], locs[j]));
  if (max_d == 0.0) return 1.0;

  constexpr int kBins = 15;
  const double cutoff = 0.5 * max_d;
  std::array<double, kBins> sum{};
  std::array<int, kBins> count{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(locs[i], locs[j]);
      if (d >= cutoff) continue;
      const int bin = std::min(kBins - 1, static_cast<int>(d / cutoff * kBins));
      const double diff = observed[static_cast<Eigen::Index>(i)] - observed[static_cast<Eigen::Index>(j)];
      sum[bin] += 0.5 * diff * diff;
      ++count[bin];
    }
  }
  const double mean = observed.mean();
  const double variance = (observed.array() - mean).square().sum() / std::max<double>(1, n - 1);
  for (int b = 0; b < kBins; ++b) {
    if (count[b] == 0) continue;
    if (sum[b] / count[b] >= 0.95 * variance) return (b + 0.5) * cutoff / kBins;
  }
  return cutoff;
}

namespace {

constexpr double kRejected = 1e300;
constexpr double kMinLogRho = -6.907755278982137;  // log 1e-3
constexpr double kMaxLogRho = 2.302585092994046;   // log 10
constexpr double kMinLogTau2 = -23.025850929940457; // log 1e-10

struct Objective {
  std::span<const Location> locs;
  const Eigen::VectorXd* observed;
  double log_variance;
};

MaternParams unpack(const gsl_vector* v) {
  MaternParams p;
  p.sigma2 = std::exp(gsl_vector_get(v, 0));
  p.rho = std::exp(gsl_vector_get(v, 1));
  p.tau2 = std::exp(gsl_vector_get(v, 2));
  return p;
}

double negative_log_likelihood(const gsl_vector* v, void* raw) {
  const auto& obj = *static_cast<const Objective*>(raw);
  const double log_sigma2 = gsl_vector_get(v, 0);
  const double log_rho = gsl_vector_get(v, 1);
  const double log_tau2 = gsl_vector_get(v, 2);
  // Keep the search in a box where the covariance stays representable.
  if (log_rho < kMinLogRho || log_rho > kMaxLogRho || log_tau2 < kMinLogTau2 ||
      std::abs(log_sigma2 - obj.log_variance) > 15.0 || log_tau2 > obj.log_variance + 5.0) {
    return kRejected;
  }
  try {
    const double ll = profile_log_likelihood(obj.locs, *obj.observed, unpack(v));
    return std::isfinite(ll) ? -ll : kRejected;
  } catch (const NotPositiveDefinite&) {
    return kRejected;
  }
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

}  // namespace

MaternFit fit_matern_ml(std::span<const Location> locs, const Eigen::VectorXd& observed,
                        const FitOptions& options) {
  if (locs.size() < 5) throw PreconditionError("fit_matern_ml: need at least 5 observations");
  if (observed.size() != static_cast<Eigen::Index>(locs.size())) {
    throw DimensionMismatch("fit_matern_ml: locations and observations differ in length");
  }
  const double mean = observed.mean();
  const double variance = (observed.array() - mean).square().sum() / (observed.size() - 1);
  if (!(variance > 1e-300)) throw FitFailed("fit_matern_ml: observations have no spread");

  gsl_set_error_handler_off();
  Objective objective{locs, &observed, std::log(variance)};
  gsl_multimin_function fn{&negative_log_likelihood, 3, &objective};

  const double range = std::clamp(empirical_variogram_range(locs, observed), 2e-3, 5.0);
  MaternFit best;
  double best_value = std::numeric_limits<double>::infinity();
  for (double range_scale : {0.5, 1.0, 2.0}) {
    std::unique_ptr<gsl_vector, VectorDeleter> start(gsl_vector_alloc(3));
    std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(3));
    gsl_vector_set(start.get(), 0, std::log(0.9 * variance));
    gsl_vector_set(start.get(), 1, std::log(range_scale * range));
    gsl_vector_set(start.get(), 2, std::log(0.1 * variance));
    gsl_vector_set_all(step.get(), 0.5);

    std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> minimizer(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3));
    if (gsl_multimin_fminimizer_set(minimizer.get(), &fn, start.get(), step.get()) != GSL_SUCCESS) {
      continue;
    }
    bool converged = false;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
      if (gsl_multimin_fminimizer_iterate(minimizer.get()) != GSL_SUCCESS) break;
      const double size = gsl_multimin_fminimizer_size(minimizer.get());
      if (gsl_multimin_test_size(size, options.simplex_tolerance) == GSL_SUCCESS) {
        converged = true;
        break;
      }
    }
    const double value = minimizer->fval;
    if (!converged || !(value < kRejected)) continue;
    ++best.converged_starts;
    if (value < best_value) {
      best_value = value;
      best.params = unpack(minimizer->x);
      best.log_likelihood = -value;
    }
  }
  if (best.converged_starts == 0) {
    throw FitFailed("fit_matern_ml: no start converged within " +
                    std::to_string(options.max_iterations) + " iterations");
  }
  return best;
}

}  // namespace sntl
