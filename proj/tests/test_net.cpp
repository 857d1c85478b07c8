#include "sntl/basis.hpp"
#include "sntl/error.hpp"
#include "sntl/net/adam.hpp"
#include "sntl/net/network.hpp"
#include "sntl/net/train.hpp"
#include "sntl/numerics/finite_diff.hpp"
#include "sntl/surfaces.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sntl {
namespace {

Eigen::VectorXd random_input(Eigen::Index dim, RandomState& rng) {
  Eigen::VectorXd x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x[i] = rng.next_uniform();
  return x;
}

// Straight-line evaluation with explicit loops.
double reference_forward(const NetworkParams& p, const Eigen::VectorXd& x) {
  std::vector<double> h(x.data(), x.data() + x.size());
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    const auto& w = p.layers[k].weight;
    std::vector<double> next(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      double acc = p.layers[k].bias[r];
      for (Eigen::Index c = 0; c < w.cols(); ++c) acc += w(r, c) * h[static_cast<std::size_t>(c)];
      next[static_cast<std::size_t>(r)] = (k + 1 < p.layers.size()) ? std::max(acc, 0.0) : acc;
    }
    h = std::move(next);
  }
  return h[0];
}

TEST(Architecture, Default) {
  const Architecture a = Architecture::spatial_default();
  EXPECT_EQ(a.layer_count(), 8u);
  EXPECT_EQ(a.input_dim(), 139u);
  EXPECT_EQ(a.describe(), "139-100-100-100-100-100-100-100-1");
  EXPECT_EQ(NetworkParams::zeros(a).parameter_count(), 139u * 100 + 100 + 6 * (100 * 100 + 100) + 101);
}

TEST(InitNetwork, HeVarianceAndZeroBias) {
  RandomState rng(1);
  const NetworkParams p = init_network(Architecture::spatial_default(), rng);
  const Eigen::MatrixXd& w = p.layers[0].weight;
  ASSERT_EQ(w.size(), 13900);
  const double mean = w.mean();
  const double var = (w.array() - mean).square().sum() / static_cast<double>(w.size() - 1);
  EXPECT_NEAR(var, 2.0 / 139.0, 0.2 * 2.0 / 139.0);
  for (const auto& layer : p.layers) EXPECT_EQ(layer.bias, Eigen::VectorXd::Zero(layer.bias.size()));
  RandomState again(1);
  EXPECT_EQ(init_network(Architecture::spatial_default(), again), p);
}

TEST(Forward, ConstantOutputFromBias) {
  NetworkParams p = NetworkParams::zeros(Architecture::spatial_default());
  p.layers.back().bias[0] = 3.5;
  RandomState rng(2);
  for (int t = 0; t < 5; ++t) EXPECT_EQ(forward(p, random_input(139, rng)).y, 3.5);
}

TEST(Forward, ReluGateBlocksNegativeUnit) {
  const Architecture arch{{2, 2, 1}};
  NetworkParams p = NetworkParams::zeros(arch);
  p.layers[0].weight << 1.0, 1.0, -1.0, -1.0;
  p.layers[1].weight << 1.0, 10.0;
  const Eigen::Vector2d x(0.3, 0.4);
  EXPECT_DOUBLE_EQ(forward(p, x).y, 0.7);
  p.layers[1].weight(0, 1) = -50.0;
  EXPECT_DOUBLE_EQ(forward(p, x).y, 0.7);
}

TEST(Forward, MatchesReferenceImplementation) {
  RandomState rng(3);
  const NetworkParams p = init_network(Architecture::spatial_default(), rng);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd x = random_input(139, rng);
    const double ref = reference_forward(p, x);
    EXPECT_NEAR(forward(p, x).y, ref, 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST(Forward, BatchMatchesSingle) {
  RandomState rng(4);
  const NetworkParams p = init_network(Architecture::spatial_default(), rng);
  Eigen::MatrixXd design(700, 139);
  for (Eigen::Index i = 0; i < design.rows(); ++i) design.row(i) = random_input(139, rng).transpose();
  const Eigen::VectorXd y = predict(p, design);
  for (Eigen::Index i : {0, 1, 511, 512, 699}) {
    EXPECT_NEAR(y[i], forward(p, design.row(i).transpose()).y, 1e-12);
  }
  EXPECT_THROW(forward(p, Eigen::VectorXd::Ones(10)), DimensionMismatch);
}

TEST(Forward, OutputLayerHomogeneity) {
  RandomState rng(5);
  NetworkParams p = init_network(Architecture::spatial_default(), rng);
  p.layers.back().bias[0] = 0.25;
  const Eigen::VectorXd x = random_input(139, rng);
  const double y = forward(p, x).y;
  p.layers.back().weight *= 4.0;
  p.layers.back().bias *= 4.0;
  EXPECT_EQ(forward(p, x).y, 4.0 * y);
}

TEST(Backward, ZeroResidualGivesZeroGradient) {
  RandomState rng(6);
  const NetworkParams p = init_network(Architecture::spatial_default(), rng);
  const auto fr = forward(p, random_input(139, rng));
  EXPECT_EQ(backward(p, fr.cache, 0.0).flatten().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Backward, OutputBiasGradientIsResidual) {
  RandomState rng(7);
  const NetworkParams p = init_network(Architecture::spatial_default(), rng);
  const auto fr = forward(p, random_input(139, rng));
  EXPECT_EQ(backward(p, fr.cache, -0.37).layers.back().bias[0], -0.37);
}

TEST(Backward, MatchesFiniteDifferences) {
  const Architecture arch{{139, 3, 3, 3, 3, 3, 3, 3, 1}};
  std::size_t agree = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomState rng = RandomState(808).derive_child(seed);
    NetworkParams p = init_network(arch, rng);
    for (auto& layer : p.layers)
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = 0.1 * rng.next_standard_normal();
    const Eigen::VectorXd x = random_input(139, rng);
    const double target = rng.next_standard_normal();
    const auto fr = forward(p, x);
    const Eigen::VectorXd analytic = backward(p, fr.cache, fr.y - target).flatten();
    NetworkParams probe = p;
    const ScalarField loss = [&](const Eigen::VectorXd& theta) {
      probe.assign_flat(theta);
      const double r = forward(probe, x).y - target;
      return 0.5 * r * r;
    };
    const Eigen::VectorXd numeric = finite_diff_gradient(loss, p.flatten(), 1e-6);
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
      const double tol = std::max(1e-6, 1e-4 * std::abs(numeric[i]));
      agree += std::abs(analytic[i] - numeric[i]) <= tol ? 1 : 0;
      ++total;
    }
  }
  EXPECT_GE(static_cast<double>(agree), 0.99 * static_cast<double>(total));
}

TEST(Backward, BatchGradientIsMeanOfSingles) {
  RandomState rng(9);
  const NetworkParams p = init_network(Architecture{{139, 20, 20, 1}}, rng);
  Eigen::MatrixXd x(139, 5);
  for (int b = 0; b < 5; ++b) x.col(b) = random_input(139, rng);
  ForwardCache cache;
  const Eigen::RowVectorXd y = forward_batch(p, x, &cache);
  Eigen::RowVectorXd dy(5);
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.parameter_count()));
  for (int b = 0; b < 5; ++b) {
    dy[b] = (y[b] - 0.1 * b) / 5.0;
    const auto fr = forward(p, x.col(b));
    expected += backward(p, fr.cache, (fr.y - 0.1 * b) / 5.0).flatten();
  }
  NetworkParams grad = NetworkParams::zeros(p.architecture());
  backward_batch(p, cache, dy, grad);
  EXPECT_LT((grad.flatten() - expected).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Adam, FirstStepIsSignedLearningRate) {
  const Architecture arch{{3, 2, 1}};
  RandomState rng(10);
  NetworkParams p = init_network(arch, rng);
  const NetworkParams before = p;
  NetworkParams g = NetworkParams::zeros(arch);
  g.layers[0].weight << 0.5, -2.0, 3.0, -0.1, 7.0, 0.2;
  AdamState state = AdamState::fresh(arch);
  adam_step(p, g, state, AdamConfig{});
  const Eigen::MatrixXd delta = p.layers[0].weight - before.layers[0].weight;
  for (Eigen::Index i = 0; i < delta.size(); ++i) {
    EXPECT_NEAR(delta.data()[i], -0.001 * (g.layers[0].weight.data()[i] > 0 ? 1.0 : -1.0), 1e-9);
  }
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, ZeroGradientLeavesParams) {
  const Architecture arch{{3, 2, 1}};
  RandomState rng(11);
  NetworkParams p = init_network(arch, rng);
  const NetworkParams before = p;
  AdamState state = AdamState::fresh(arch);
  adam_step(p, NetworkParams::zeros(arch), state, AdamConfig{});
  EXPECT_EQ(p, before);
}

TEST(Adam, ScalarQuadraticRecurrence) {
  // Single parameter w (1x1 weight, bias held at its gradient of zero),
  // loss (w - 3)^2 / 2, two steps.
  const Architecture arch{{1, 1}};
  NetworkParams p = NetworkParams::zeros(arch);
  p.layers[0].weight(0, 0) = 0.5;
  const AdamConfig cfg{0.1, 0.9, 0.999, 1e-8};
  AdamState state = AdamState::fresh(arch);
  double w = 0.5, m = 0.0, v = 0.0;
  for (int t = 1; t <= 2; ++t) {
    NetworkParams g = NetworkParams::zeros(arch);
    g.layers[0].weight(0, 0) = p.layers[0].weight(0, 0) - 3.0;
    adam_step(p, g, state, cfg);
    const double gw = w - 3.0;
    m = 0.9 * m + 0.1 * gw;
    v = 0.999 * v + 0.001 * gw * gw;
    const double mhat = m / (1.0 - std::pow(0.9, t));
    const double vhat = v / (1.0 - std::pow(0.999, t));
    w -= 0.1 * mhat / (std::sqrt(vhat) + 1e-8);
    EXPECT_NEAR(p.layers[0].weight(0, 0), w, 1e-12);
  }
}

TEST(Adam, ShapeMismatch) {
  NetworkParams p = NetworkParams::zeros(Architecture{{3, 2, 1}});
  AdamState state = AdamState::fresh(p.architecture());
  EXPECT_THROW(adam_step(p, NetworkParams::zeros(Architecture{{3, 4, 1}}), state, AdamConfig{}), DimensionMismatch);
}

class TrainFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto spec = default_level_spec();
    basis_ = MultiResolutionBasis::build(spec);
    RandomState rng(20);
    for (int i = 0; i < 60; ++i) locs_.push_back({rng.next_uniform(), rng.next_uniform()});
    design_ = basis_.embed_batch(locs_);
    targets_.resize(60);
    for (int i = 0; i < 60; ++i) targets_[i] = nonstationary_f(locs_[static_cast<std::size_t>(i)]);
  }
  MultiResolutionBasis basis_ = MultiResolutionBasis::build(std::vector<LevelSpec>{{1, 1, 1.0}});
  std::vector<Location> locs_;
  Eigen::MatrixXd design_;
  Eigen::VectorXd targets_;
};

TEST_F(TrainFixture, FitsConstant) {
  RandomState rng(21);
  const NetworkParams init = init_network(Architecture::spatial_default(), rng);
  TrainConfig cfg;
  cfg.epochs = 200;
  const TrainResult r = train(init, design_, Eigen::VectorXd::Constant(60, 0.7), cfg, rng);
  EXPECT_LT(r.trace.train_mse.back(), 1e-4);
  EXPECT_LT(mean_squared_error(predict(r.params, design_), Eigen::VectorXd::Constant(60, 0.7)), 1e-4);
  EXPECT_EQ(r.trace.train_mse.size(), 200u);
  EXPECT_TRUE(r.trace.validation_mse.empty());
}

TEST_F(TrainFixture, TrainingMseDecreasesAcrossSeeds) {
  int decreased = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomState rng = RandomState(22).derive_child(seed);
    const NetworkParams init = init_network(Architecture::spatial_default(), rng);
    TrainConfig cfg;
    cfg.epochs = 30;
    const TrainResult r = train(init, design_, targets_, cfg, rng);
    decreased += r.trace.train_mse.back() < r.trace.train_mse.front() ? 1 : 0;
  }
  EXPECT_GE(decreased, 19);
}

TEST_F(TrainFixture, DeterministicAndValidationTraced) {
  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.validation_fraction = 0.2;
  auto run = [&] {
    RandomState rng(23);
    const NetworkParams init = init_network(Architecture::spatial_default(), rng);
    return train(init, design_, targets_, cfg, rng);
  };
  const TrainResult a = run();
  const TrainResult b = run();
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.trace.train_mse, b.trace.train_mse);
  EXPECT_EQ(a.trace.validation_mse.size(), 15u);
  EXPECT_EQ(a.trace.validation_mse, b.trace.validation_mse);
}

TEST_F(TrainFixture, ZeroEpochsReturnsInitialParams) {
  RandomState rng(24);
  const NetworkParams init = init_network(Architecture::spatial_default(), rng);
  TrainConfig cfg;
  cfg.epochs = 0;
  const TrainResult r = train(init, design_, targets_, cfg, rng);
  EXPECT_EQ(r.params, init);
  EXPECT_TRUE(r.trace.train_mse.empty());
}

TEST_F(TrainFixture, Errors) {
  RandomState rng(25);
  const NetworkParams init = init_network(Architecture::spatial_default(), rng);
  TrainConfig cfg;
  cfg.epochs = 1;
  EXPECT_THROW(train(init, Eigen::MatrixXd(0, 139), Eigen::VectorXd(), cfg, rng), EmptyDataset);
  EXPECT_THROW(train(init, design_, Eigen::VectorXd::Zero(3), cfg, rng), DimensionMismatch);
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.validation_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Shuffle, IsPermutation) {
  std::vector<Eigen::Index> idx(100);
  std::iota(idx.begin(), idx.end(), 0);
  RandomState rng(26);
  shuffle_indices(idx, rng);
  std::vector<Eigen::Index> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  for (Eigen::Index i = 0; i < 100; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
  EXPECT_FALSE(std::is_sorted(idx.begin(), idx.end()));
}

}  // namespace
}  // namespace sntl
