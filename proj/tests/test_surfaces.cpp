#include "sntl/error.hpp"
#include "sntl/gp/matern.hpp"
#include "sntl/surfaces.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <utility>

namespace sntl {
namespace {

double f_direct(double s1, double s2) {
  const double s = 0.5 * (s1 + s2) - 0.9;
  return std::sin(30.0 * std::pow(s, 4)) * std::cos(2.0 * s) + s / 2.0;
}

SimulationConfig small_config() {
  SimulationConfig cfg;
  cfg.source_side = 12;
  cfg.test_size = 100;
  return cfg;
}

TEST(NonstationaryF, Values) {
  EXPECT_EQ(nonstationary_f({0.9, 0.9}), 0.0);
  EXPECT_NEAR(nonstationary_f({0.5, 0.5}), 0.2839, 1e-3);
  EXPECT_NEAR(nonstationary_f({0.0, 0.0}), -0.6182, 1e-3);
  EXPECT_NEAR(nonstationary_f({0.3, 0.8}), f_direct(0.3, 0.8), 1e-15);
}

TEST(RegularGrid, CoversUnitSquare) {
  const auto grid = regular_grid(70);
  ASSERT_EQ(grid.size(), 4900u);
  EXPECT_EQ(grid.front(), (Location{0.0, 0.0}));
  EXPECT_EQ(grid.back(), (Location{1.0, 1.0}));
}

TEST(MakeReplicate, NonstationarySourceSignalIsExact) {
  const auto d = make_replicate(Process::nonstationary, SimulationConfig{}, 25, RandomState(1));
  ASSERT_EQ(d.source.size(), 4900u);
  for (std::size_t i = 0; i < d.source.size(); ++i) {
    ASSERT_EQ(d.source.signal[static_cast<Eigen::Index>(i)], nonstationary_f(d.source.locations[i]));
  }
  EXPECT_EQ(d.target.size(), 25u);
  EXPECT_EQ(d.test.size(), 2000u);
  const double noise_var = (d.source.observed - d.source.signal).squaredNorm() / 4900.0;
  EXPECT_NEAR(noise_var, 1e-6, 2e-7);
}

TEST(MakeReplicate, NonstationarySignalIdenticalAcrossReplicates) {
  const SimulationConfig cfg = small_config();
  const auto a = make_replicate(Process::nonstationary, cfg, 16, RandomState(1));
  const auto b = make_replicate(Process::nonstationary, cfg, 16, RandomState(2));
  EXPECT_EQ(a.source.signal, b.source.signal);
  EXPECT_NE(a.source.observed, b.source.observed);
}

TEST(MakeReplicate, StationaryDeterministic) {
  const SimulationConfig cfg = small_config();
  const auto a = make_replicate(Process::stationary, cfg, 25, RandomState(9));
  const auto b = make_replicate(Process::stationary, cfg, 25, RandomState(9));
  EXPECT_EQ(a.source.signal, b.source.signal);
  EXPECT_EQ(a.target.observed, b.target.observed);
  EXPECT_EQ(a.test.locations, b.test.locations);
  EXPECT_EQ(a.test.signal, b.test.signal);
}

TEST(MakeReplicate, RolesAreDisjointAndInsideUnitSquare) {
  const SimulationConfig cfg = small_config();
  for (Process p : {Process::stationary, Process::nonstationary}) {
    const auto d = make_replicate(p, cfg, 64, RandomState(4));
    std::set<std::pair<double, double>> seen;
    for (const Dataset* ds : {&d.source, &d.target, &d.test}) {
      EXPECT_EQ(ds->observed.size(), static_cast<Eigen::Index>(ds->size()));
      EXPECT_EQ(ds->signal.size(), static_cast<Eigen::Index>(ds->size()));
      for (const auto& l : ds->locations) {
        EXPECT_TRUE(seen.emplace(l.s1, l.s2).second);
        EXPECT_GE(l.s1, 0.0);
        EXPECT_LE(l.s1, 1.0);
        EXPECT_GE(l.s2, 0.0);
        EXPECT_LE(l.s2, 1.0);
      }
    }
  }
}

TEST(MakeReplicate, TargetGridJitterStaysInCell) {
  const SimulationConfig cfg = small_config();
  const auto d = make_replicate(Process::nonstationary, cfg, 25, RandomState(4));
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const Location& l = d.target.locations[i * 5 + j];
      EXPECT_LE(std::abs(l.s1 - (j + 0.5) / 5.0), cfg.target_jitter / 5.0 + 1e-15);
      EXPECT_LE(std::abs(l.s2 - (i + 0.5) / 5.0), cfg.target_jitter / 5.0 + 1e-15);
    }
  }
}

TEST(MakeReplicate, NonSquareTargetRejected) {
  EXPECT_THROW(make_replicate(Process::nonstationary, small_config(), 30, RandomState(1)), PreconditionError);
}

TEST(MakeReplicate, StationaryJointCovarianceMonteCarlo) {
  // 2x2 source grid at the corners, 2x2 target grid at the cell centres,
  // no jitter. 5000 draws put the 5% tolerance near two standard errors, so
  // the estimate uses more.
  SimulationConfig cfg;
  cfg.source_side = 2;
  cfg.test_size = 0;
  cfg.target_jitter = 0.0;
  cfg.matern.rho = 1.0;
  const int draws = 20000;
  Eigen::MatrixXd sum_prod = Eigen::MatrixXd::Zero(4, 4);
  Eigen::VectorXd sum_src = Eigen::VectorXd::Zero(4), sum_tgt = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd sum_src_sq = Eigen::VectorXd::Zero(4);
  std::vector<Location> src_locs, tgt_locs;
  const RandomState master(555);
  for (int t = 0; t < draws; ++t) {
    const auto d = make_replicate(Process::stationary, cfg, 4, master.derive_child(static_cast<std::uint64_t>(t)));
    if (t == 0) {
      src_locs = d.source.locations;
      tgt_locs = d.target.locations;
    }
    sum_prod += d.source.signal * d.target.signal.transpose();
    sum_src += d.source.signal;
    sum_tgt += d.target.signal;
    sum_src_sq += d.source.signal.cwiseAbs2();
  }
  const Eigen::MatrixXd cov = sum_prod / draws - (sum_src / draws) * (sum_tgt / draws).transpose();
  // Corner k is nearest to target centre k (both row-major).
  for (int k = 0; k < 4; ++k) {
    const double expected = matern_cov(distance(src_locs[static_cast<std::size_t>(k)], tgt_locs[static_cast<std::size_t>(k)]), cfg.matern);
    EXPECT_NEAR(distance(src_locs[static_cast<std::size_t>(k)], tgt_locs[static_cast<std::size_t>(k)]), std::sqrt(0.125), 1e-15);
    EXPECT_LT(std::abs(cov(k, k) - expected) / expected, 0.05) << "pair " << k;
    const double var = sum_src_sq[k] / draws - std::pow(sum_src[k] / draws, 2);
    EXPECT_LT(std::abs(var - cfg.matern.sigma2), 0.05 * cfg.matern.sigma2);
  }
  // Opposite corner: the farthest cross pair.
  const double far = matern_cov(distance(src_locs[0], tgt_locs[3]), cfg.matern);
  EXPECT_NEAR(cov(0, 3), far, 0.05 + 0.05 * far);
}

TEST(DrawReplicate, TestLocationsSharedAcrossSizes) {
  const SimulationConfig cfg = small_config();
  const SourceSurface surface = SourceSurface::draw(Process::stationary, cfg, RandomState(7));
  const std::size_t sizes[] = {4, 9, 16};
  const ReplicateData data = draw_replicate(surface, sizes, RandomState(8));
  EXPECT_EQ(data.target(9).size(), 9u);
  EXPECT_THROW(data.target(25), PreconditionError);
  EXPECT_EQ(data.test.size(), cfg.test_size);
}

TEST(DrawReplicate, ExtendingTheSurfaceKeepsSourceFixed) {
  const SimulationConfig cfg = small_config();
  const SourceSurface surface = SourceSurface::draw(Process::stationary, cfg, RandomState(7));
  RandomState rng(3);
  const Eigen::VectorXd at_source = surface.extend_signal(surface.source().locations, rng);
  EXPECT_LT((at_source - surface.source().signal).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(ProcessNames, RoundTrip) {
  EXPECT_EQ(parse_process("stationary"), Process::stationary);
  EXPECT_EQ(parse_process(to_string(Process::nonstationary)), Process::nonstationary);
  EXPECT_THROW(parse_process("wavy"), ConfigError);
}

}  // namespace
}  // namespace sntl
