#pragma once

#include <Eigen/Dense>

#include <functional>

namespace sntl {

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// Central differences (f(x + h e_i) - f(x - h e_i)) / (2h) per coordinate.
inline Eigen::VectorXd finite_diff_gradient(const ScalarField& f, const Eigen::VectorXd& x,
                                            double h) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace sntl
