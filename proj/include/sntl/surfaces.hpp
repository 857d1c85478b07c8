#pragma once

#include "sntl/basis.hpp"
#include "sntl/gp/matern.hpp"
#include "sntl/numerics/linalg.hpp"
#include "sntl/numerics/random.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace sntl {

enum class Process { stationary, nonstationary };
enum class DatasetRole { source, target, test };

std::string_view to_string(Process p);
std::string_view to_string(DatasetRole r);
/// Throws ConfigError for unknown names.
Process parse_process(std::string_view name);

struct Dataset {
  DatasetRole role = DatasetRole::source;
  Process process = Process::stationary;
  std::vector<Location> locations;
  Eigen::VectorXd observed;
  Eigen::VectorXd signal;
  /// Seeds of the random streams this dataset was drawn from, outermost first.
  std::vector<std::uint64_t> seed_lineage;

  std::size_t size() const { return locations.size(); }
};

struct SimulationConfig {
  std::size_t source_side = 70;   // source grid is side x side over [0,1]^2
  std::size_t test_size = 2000;
  double target_jitter = 0.1;     // half-width of the uniform offset, in target grid spacings
  MaternParams matern;            // stationary process; tau2 is its nugget variance
  double nonstationary_nugget = 1e-6;
};

/// sin(30 (m - 0.9)^4) cos(2 (m - 0.9)) + (m - 0.9) / 2 with m the mean coordinate.
double nonstationary_f(const Location& loc);

/// Regular side x side grid including the boundary, row-major.
std::vector<Location> regular_grid(std::size_t side);

/// The realization on the source grid that every replicate of a process
/// shares. For the stationary process it keeps the covariance factor and the
/// whitened signal so further locations can be drawn from the same
/// realization by conditioning.
class SourceSurface {
 public:
  static SourceSurface draw(Process process, const SimulationConfig& cfg, RandomState state);

  Process process() const { return process_; }
  const SimulationConfig& config() const { return cfg_; }
  const Dataset& source() const { return source_; }

  /// Signal at new locations, jointly distributed with the source signal.
  /// Uses only `state`; duplicate locations receive identical values.
  Eigen::VectorXd extend_signal(std::span<const Location> locs, RandomState& state) const;

 private:
  Process process_ = Process::stationary;
  SimulationConfig cfg_;
  Dataset source_;
  std::optional<CholeskyFactor> factor_;
  Eigen::VectorXd whitened_;  // L^-1 signal
};

/// Target sets (one per requested size, all sharing one realization) and a
/// test set for one replicate. Target sizes must be perfect squares.
struct ReplicateData {
  std::vector<std::size_t> target_sizes;
  std::vector<Dataset> targets;
  Dataset test;

  /// Throws PreconditionError if n was not drawn.
  const Dataset& target(std::size_t n) const;
};

ReplicateData draw_replicate(const SourceSurface& surface, std::span<const std::size_t> target_sizes,
                             RandomState state);

struct ReplicateDatasets {
  Dataset source;
  Dataset target;
  Dataset test;
};

/// Single-size convenience: draws the source surface from child stream 1 of
/// `state` and the target and test sets from child stream 2.
ReplicateDatasets make_replicate(Process process, const SimulationConfig& cfg, std::size_t target_n,
                                 const RandomState& state);

}  // namespace sntl
