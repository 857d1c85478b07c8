#include "sntl/basis.hpp"

#include "sntl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sntl {

double distance(const Location& a, const Location& b) {
  return std::hypot(a.s1 - b.s1, a.s2 - b.s2);
}

double wendland(double d) {
  if (d < 0.0 || std::isnan(d)) throw DomainError("wendland: distance must be non-negative");
  if (d >= 1.0) return 0.0;
  const double r = 1.0 - d;
  const double r2 = r * r;
  return r2 * r2 * r2 * (35.0 * d * d + 18.0 * d + 3.0) / 3.0;
}

// phi'(d) = -56/3 d (5d + 1) (1 - d)^5, whose magnitude peaks at the positive
// root of 35d^2 - 4d - 1 = 0.
double wendland_lipschitz_constant() {
  const double d = (4.0 + std::sqrt(156.0)) / 70.0;
  return 56.0 / 3.0 * d * (5.0 * d + 1.0) * std::pow(1.0 - d, 5);
}

double grid_spacing(std::size_t count) {
  return count > 1 ? 1.0 / static_cast<double>(count - 1) : 1.0;
}

namespace {

double grid_coordinate(std::size_t index, std::size_t count) {
  return count > 1 ? static_cast<double>(index) / static_cast<double>(count - 1) : 0.5;
}

}  // namespace

MultiResolutionBasis MultiResolutionBasis::build(std::span<const LevelSpec> spec) {
  if (spec.empty()) throw EmptySpec("basis: no resolution levels given");
  MultiResolutionBasis basis;
  for (const LevelSpec& level : spec) {
    if (level.rows == 0 || level.cols == 0) {
      throw DomainError("basis: every level needs at least one row and one column");
    }
    if (!(level.theta > 0.0)) throw DomainError("basis: support radius must be positive");
    KnotLevel knots{level.rows, level.cols, level.theta, {}};
    knots.knots.reserve(level.rows * level.cols);
    for (std::size_t i = 0; i < level.rows; ++i) {
      for (std::size_t j = 0; j < level.cols; ++j) {
        knots.knots.push_back({grid_coordinate(j, level.cols), grid_coordinate(i, level.rows)});
      }
    }
    basis.total_dim_ += knots.knots.size();
    basis.levels_.push_back(std::move(knots));
  }
  return basis;
}

double MultiResolutionBasis::min_theta() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& level : levels_) best = std::min(best, level.theta);
  return best;
}

Eigen::VectorXd MultiResolutionBasis::embed(const Location& loc) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(total_dim_));
  Eigen::Index k = 0;
  for (const auto& level : levels_) {
    for (const auto& knot : level.knots) out[k++] = wendland(distance(loc, knot) / level.theta);
  }
  return out;
}

Eigen::MatrixXd MultiResolutionBasis::embed_batch(std::span<const Location> locs) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(locs.size()),
                      static_cast<Eigen::Index>(total_dim_));
  for (std::size_t i = 0; i < locs.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = embed(locs[i]).transpose();
  }
  return out;
}

std::vector<LevelSpec> default_level_spec(bool scale_by_spacing, double support_multiplier) {
  const std::size_t grids[4][2] = {{3, 3}, {5, 5}, {7, 7}, {7, 8}};
  std::vector<LevelSpec> spec;
  for (const auto& g : grids) {
    const double spacing = std::max(grid_spacing(g[0]), grid_spacing(g[1]));
    spec.push_back({g[0], g[1], scale_by_spacing ? support_multiplier * spacing : 1.0});
  }
  return spec;
}

}  // namespace sntl
