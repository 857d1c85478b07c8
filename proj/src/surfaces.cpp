#include "sntl/surfaces.hpp"

#include "sntl/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>

namespace sntl {

std::string_view to_string(Process p) {
  return p == Process::stationary ? "stationary" : "nonstationary";
}

std::string_view to_string(DatasetRole r) {
  switch (r) {
    case DatasetRole::source: return "source";
    case DatasetRole::target: return "target";
    case DatasetRole::test: return "test";
  }
  return "unknown";
}

Process parse_process(std::string_view name) {
  if (name == "stationary") return Process::stationary;
  if (name == "nonstationary") return Process::nonstationary;
  throw ConfigError("unknown process '" + std::string(name) + "'");
}

double nonstationary_f(const Location& loc) {
  const double u = 0.5 * (loc.s1 + loc.s2) - 0.9;
  const double u2 = u * u;
  return std::sin(30.0 * u2 * u2) * std::cos(2.0 * u) + 0.5 * u;
}

std::vector<Location> regular_grid(std::size_t side) {
  std::vector<Location> grid;
  grid.reserve(side * side);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      if (side == 1) {
        grid.push_back({0.5, 0.5});
      } else {
        const double step = 1.0 / static_cast<double>(side - 1);
        grid.push_back({static_cast<double>(j) * step, static_cast<double>(i) * step});
      }
    }
  }
  return grid;
}

namespace {

constexpr std::uint64_t kSignalStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kLocationStream = 3;

using Key = std::pair<double, double>;
Key key_of(const Location& l) { return {l.s1, l.s2}; }

double noise_variance(Process process, const SimulationConfig& cfg) {
  return process == Process::stationary ? cfg.matern.tau2 : cfg.nonstationary_nugget;
}

Eigen::VectorXd add_noise(const Eigen::VectorXd& signal, double variance, RandomState& state) {
  Eigen::VectorXd observed = signal;
  const double sd = std::sqrt(variance);
  for (Eigen::Index i = 0; i < observed.size(); ++i) observed[i] += sd * state.next_standard_normal();
  return observed;
}

std::size_t exact_sqrt(std::size_t n) {
  auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (n == 0 || k * k != n) {
    throw PreconditionError("target size " + std::to_string(n) + " is not a positive perfect square");
  }
  return k;
}

}  // namespace

SourceSurface SourceSurface::draw(Process process, const SimulationConfig& cfg, RandomState state) {
  if (cfg.source_side == 0) throw PreconditionError("source grid must have at least one point");
  SourceSurface surface;
  surface.process_ = process;
  surface.cfg_ = cfg;
  Dataset& src = surface.source_;
  src.role = DatasetRole::source;
  src.process = process;
  src.locations = regular_grid(cfg.source_side);
  src.seed_lineage = {state.seed()};

  const auto n = static_cast<Eigen::Index>(src.locations.size());
  if (process == Process::stationary) {
    RandomState signal_state = state.derive_child(kSignalStream);
    surface.factor_ = cholesky(cov_matrix(src.locations, cfg.matern, false));
    surface.whitened_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) surface.whitened_[i] = signal_state.next_standard_normal();
    src.signal = surface.factor_->lower().triangularView<Eigen::Lower>() * surface.whitened_;
  } else {
    src.signal.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) src.signal[i] = nonstationary_f(src.locations[i]);
  }
  RandomState noise_state = state.derive_child(kNoiseStream);
  src.observed = add_noise(src.signal, noise_variance(process, cfg), noise_state);
  return surface;
}

Eigen::VectorXd SourceSurface::extend_signal(std::span<const Location> locs, RandomState& state) const {
  const auto m = static_cast<Eigen::Index>(locs.size());
  Eigen::VectorXd out(m);
  if (process_ == Process::nonstationary) {
    for (Eigen::Index i = 0; i < m; ++i) out[i] = nonstationary_f(locs[i]);
    return out;
  }

  std::map<Key, Eigen::Index> slot;
  std::vector<Location> unique;
  std::vector<Eigen::Index> index_of(locs.size());
  for (std::size_t i = 0; i < locs.size(); ++i) {
    auto [it, inserted] = slot.emplace(key_of(locs[i]), static_cast<Eigen::Index>(unique.size()));
    if (inserted) unique.push_back(locs[i]);
    index_of[i] = it->second;
  }

  // Conditional law given the source signal s = L z:
  //   mean = C_xs C_ss^-1 s = A^T z,  cov = C_xx - A^T A,  with A = L^-1 C_sx.
  Eigen::MatrixXd a = cross_cov(source_.locations, unique, cfg_.matern);
  lower_solve_in_place(*factor_, a);
  const Eigen::VectorXd mean = a.transpose() * whitened_;
  Eigen::MatrixXd cond = cov_matrix(unique, cfg_.matern, false).values();
  cond.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose(), -1.0);
  cond.triangularView<Eigen::StrictlyUpper>() = cond.transpose();
  a.resize(0, 0);

  const CholeskyFactor cond_factor = cholesky(SpdMatrix(std::move(cond)));
  Eigen::VectorXd z(static_cast<Eigen::Index>(unique.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = state.next_standard_normal();
  const Eigen::VectorXd values = mean + cond_factor.lower().triangularView<Eigen::Lower>() * z;
  for (Eigen::Index i = 0; i < m; ++i) out[i] = values[index_of[static_cast<std::size_t>(i)]];
  return out;
}

const Dataset& ReplicateData::target(std::size_t n) const {
  for (std::size_t i = 0; i < target_sizes.size(); ++i) {
    if (target_sizes[i] == n) return targets[i];
  }
  throw PreconditionError("replicate has no target set of size " + std::to_string(n));
}

ReplicateData draw_replicate(const SourceSurface& surface, std::span<const std::size_t> target_sizes,
                             RandomState state) {
  const SimulationConfig& cfg = surface.config();
  RandomState loc_state = state.derive_child(kLocationStream);
  RandomState signal_state = state.derive_child(kSignalStream);
  RandomState noise_state = state.derive_child(kNoiseStream);

  std::set<Key> source_points;
  for (const auto& l : surface.source().locations) source_points.insert(key_of(l));

  ReplicateData out;
  out.target_sizes.assign(target_sizes.begin(), target_sizes.end());
  std::set<Key> target_points;
  for (std::size_t n : target_sizes) {
    const std::size_t k = exact_sqrt(n);
    const double spacing = 1.0 / static_cast<double>(k);
    Dataset target;
    target.role = DatasetRole::target;
    target.process = surface.process();
    target.seed_lineage = {surface.source().seed_lineage.front(), state.seed()};
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        Location loc;
        do {
          const double dx = (2.0 * loc_state.next_uniform() - 1.0) * cfg.target_jitter * spacing;
          const double dy = (2.0 * loc_state.next_uniform() - 1.0) * cfg.target_jitter * spacing;
          loc.s1 = std::clamp((static_cast<double>(j) + 0.5) * spacing + dx, 0.0, 1.0);
          loc.s2 = std::clamp((static_cast<double>(i) + 0.5) * spacing + dy, 0.0, 1.0);
        } while (source_points.contains(key_of(loc)));
        target.locations.push_back(loc);
        target_points.insert(key_of(loc));
      }
    }
    out.targets.push_back(std::move(target));
  }

  out.test.role = DatasetRole::test;
  out.test.process = surface.process();
  out.test.seed_lineage = {surface.source().seed_lineage.front(), state.seed()};
  std::set<Key> test_points;
  while (out.test.locations.size() < cfg.test_size) {
    const Location loc{loc_state.next_uniform(), loc_state.next_uniform()};
    const Key key = key_of(loc);
    if (source_points.contains(key) || target_points.contains(key) || test_points.contains(key)) continue;
    test_points.insert(key);
    out.test.locations.push_back(loc);
  }

  std::vector<Location> all;
  for (const auto& t : out.targets) all.insert(all.end(), t.locations.begin(), t.locations.end());
  all.insert(all.end(), out.test.locations.begin(), out.test.locations.end());
  const Eigen::VectorXd signal = surface.extend_signal(all, signal_state);
  const Eigen::VectorXd observed = add_noise(signal, noise_variance(surface.process(), cfg), noise_state);

  Eigen::Index offset = 0;
  auto assign = [&](Dataset& d) {
    const auto len = static_cast<Eigen::Index>(d.locations.size());
    d.signal = signal.segment(offset, len);
    d.observed = observed.segment(offset, len);
    offset += len;
  };
  for (auto& t : out.targets) assign(t);
  assign(out.test);
  return out;
}

ReplicateDatasets make_replicate(Process process, const SimulationConfig& cfg, std::size_t target_n,
                                 const RandomState& state) {
  const SourceSurface surface = SourceSurface::draw(process, cfg, state.derive_child(1));
  const std::size_t sizes[] = {target_n};
  ReplicateData data = draw_replicate(surface, sizes, state.derive_child(2));
  return {surface.source(), std::move(data.targets.front()), std::move(data.test)};
}

}  // namespace sntl
