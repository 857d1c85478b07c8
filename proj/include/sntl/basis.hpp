#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace sntl {

/// Point in the unit square. Coordinates outside [0,1] are accepted; their
/// basis entries fall to zero once beyond every support.
struct Location {
  double s1 = 0.0;
  double s2 = 0.0;

  friend bool operator==(const Location&, const Location&) = default;
};

double distance(const Location& a, const Location& b);

/// Wendland function (1-d)^6 (35d^2 + 18d + 3) / 3 on [0,1], zero beyond.
/// Throws DomainError for d < 0.
double wendland(double d);

/// Largest |dphi/dd| over [0,1]; used to bound how fast an embedding can move.
double wendland_lipschitz_constant();

struct LevelSpec {
  std::size_t rows = 1;
  std::size_t cols = 1;
  double theta = 1.0;
};

struct KnotLevel {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double theta = 0.0;
  std::vector<Location> knots;  // row-major: s2 follows the row, s1 the column
};

/// Stacked knot grids, coarse to fine. Embedding entry for knot u at a level
/// with support theta is wendland(|s - u| / theta).
class MultiResolutionBasis {
 public:
  /// Throws EmptySpec for an empty list and DomainError for zero-sized grids
  /// or non-positive support radii.
  static MultiResolutionBasis build(std::span<const LevelSpec> spec);

  std::size_t total_dim() const { return total_dim_; }
  const std::vector<KnotLevel>& levels() const { return levels_; }
  double min_theta() const;

  Eigen::VectorXd embed(const Location& loc) const;
  /// Row i equals embed(locs[i]).
  Eigen::MatrixXd embed_batch(std::span<const Location> locs) const;

 private:
  std::vector<KnotLevel> levels_;
  std::size_t total_dim_ = 0;
};

/// Knot spacing along one axis; a single knot counts as spacing 1.
double grid_spacing(std::size_t count);

/// The 139-function default: 3x3, 5x5, 7x7 and 7x8 grids. With scale_by_spacing
/// each support radius is support_multiplier times the level's larger axis
/// spacing; otherwise every radius is 1 (raw distances).
std::vector<LevelSpec> default_level_spec(bool scale_by_spacing = true,
                                          double support_multiplier = 2.5);

}  // namespace sntl
