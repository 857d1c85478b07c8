#include "oracles.hpp"

#include "sntl/error.hpp"
#include "sntl/numerics/bessel.hpp"
#include "sntl/numerics/finite_diff.hpp"
#include "sntl/numerics/linalg.hpp"
#include "sntl/numerics/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

namespace sntl {
namespace {

Eigen::MatrixXd random_spd(int n, RandomState& rng) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.next_standard_normal();
  Eigen::MatrixXd a = g * g.transpose() / n;
  a.diagonal().array() += 1.0;
  return a;
}

TEST(RandomState, NormalMomentsOverMillionDraws) {
  RandomState rng(7);
  const int n = 1'000'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_standard_normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.005);
  EXPECT_NEAR(var, 1.0, 0.01);
}

TEST(RandomState, SameSeedReplays) {
  RandomState a(42), b(42);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(a.next_standard_normal(), b.next_standard_normal());
  RandomState c(42), d(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(c.next_u64(), d.next_u64());
}

TEST(RandomState, KnownEngineSequence) {
  // std::mt19937_64 default seed yields 9981545732273789042 as its 10000th output.
  std::mt19937_64 engine;
  engine.discard(9999);
  EXPECT_EQ(engine(), 9981545732273789042ULL);
  RandomState rng(5489);
  std::mt19937_64 reference(5489);
  EXPECT_EQ(rng.next_u64(), reference());
}

TEST(RandomState, UniformInUnitInterval) {
  RandomState rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomState, ChildStreamsShareNoPrefix) {
  const RandomState parent(2024);
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 16; ++k) {
    RandomState child = parent.derive_child(k);
    for (int i = 0; i < 64; ++i) EXPECT_TRUE(seen.insert(child.next_u64()).second) << "stream " << k;
  }
}

TEST(RandomState, ChildIgnoresParentConsumption) {
  RandomState a(11), b(11);
  for (int i = 0; i < 10; ++i) b.next_u64();
  RandomState ca = a.derive_child(3), cb = b.derive_child(3);
  EXPECT_EQ(ca.next_u64(), cb.next_u64());
  EXPECT_NE(a.derive_child(3).seed(), a.derive_child(4).seed());
}

TEST(Cholesky, IdentityIsItsOwnFactor) {
  const CholeskyFactor f = cholesky(SpdMatrix(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_EQ(f.jitter(), 0.0);
  EXPECT_TRUE(f.lower().isApprox(Eigen::MatrixXd::Identity(3, 3)));
}

TEST(Cholesky, TwoByTwoByHand) {
  Eigen::MatrixXd a(2, 2);
  a << 4, 2, 2, 3;
  const CholeskyFactor f = cholesky(SpdMatrix(a));
  EXPECT_DOUBLE_EQ(f.lower()(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(f.lower()(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(f.lower()(1, 0), 1.0);
  EXPECT_NEAR(f.lower()(1, 1), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR((f.reconstruct() - a).norm(), 0.0, 1e-14);
}

TEST(Cholesky, RankOneNeedsJitter) {
  const CholeskyFactor f = cholesky(SpdMatrix(Eigen::MatrixXd::Ones(2, 2)));
  EXPECT_GT(f.jitter(), 0.0);
  const Eigen::MatrixXd expected = Eigen::MatrixXd::Ones(2, 2) + f.jitter() * Eigen::MatrixXd::Identity(2, 2);
  EXPECT_LT((f.reconstruct() - expected).norm() / expected.norm(), 1e-8);
}

TEST(Cholesky, IndefiniteThrows) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 0, 0, -1;
  EXPECT_THROW(cholesky(SpdMatrix(a)), NotPositiveDefinite);
}

TEST(SpdMatrix, RejectsAsymmetricAndNonSquare) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 0.5, 0.4, 1;
  EXPECT_THROW(SpdMatrix{a}, DomainError);
  EXPECT_THROW(SpdMatrix{Eigen::MatrixXd::Zero(2, 3)}, DimensionMismatch);
}

TEST(Cholesky, ReconstructionAcrossSizes) {
  RandomState rng(99);
  for (int n : {1, 5, 50, 200, 500}) {
    const Eigen::MatrixXd a = random_spd(n, rng);
    const CholeskyFactor f = cholesky(SpdMatrix(a));
    EXPECT_LT((f.reconstruct() - a).norm() / a.norm(), 1e-8) << "n=" << n;
    EXPECT_TRUE((f.lower().diagonal().array() > 0.0).all());
  }
}

TEST(SpdSolve, IdentityReturnsRhs) {
  const CholeskyFactor f = cholesky(SpdMatrix(Eigen::MatrixXd::Identity(3, 3)));
  const Eigen::Vector3d b(1.5, -2.0, 7.0);
  EXPECT_EQ(spd_solve(f, Eigen::VectorXd(b)), Eigen::VectorXd(b));
}

TEST(SpdSolve, TwoByTwo) {
  Eigen::MatrixXd a(2, 2);
  a << 4, 2, 2, 3;
  const Eigen::VectorXd x = spd_solve(cholesky(SpdMatrix(a)), Eigen::VectorXd(Eigen::Vector2d(6, 5)));
  EXPECT_NEAR(x[0], 1.0, 1e-14);
  EXPECT_NEAR(x[1], 1.0, 1e-14);
  EXPECT_NEAR((a * x - Eigen::Vector2d(6, 5)).norm(), 0.0, 1e-14);
}

TEST(SpdSolve, ResidualOnRandomSystems) {
  RandomState rng(5);
  for (int n : {10, 100, 500}) {
    const Eigen::MatrixXd a = random_spd(n, rng);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = rng.next_standard_normal();
    const Eigen::VectorXd x = spd_solve(cholesky(SpdMatrix(a)), b);
    EXPECT_LT((a * x - b).norm() / b.norm(), n == 10 ? 1e-10 : 1e-9) << "n=" << n;
  }
}

TEST(SpdSolve, DimensionMismatch) {
  const CholeskyFactor f = cholesky(SpdMatrix(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_THROW(spd_solve(f, Eigen::VectorXd(Eigen::VectorXd::Ones(2))), DimensionMismatch);
  EXPECT_THROW(spd_solve(f, Eigen::MatrixXd(Eigen::MatrixXd::Ones(4, 2))), DimensionMismatch);
}

TEST(BesselK1, QuadratureOracleValues) {
  EXPECT_NEAR(test::k1_quadrature(1.0), 0.6019072301972346, 1e-14);
  EXPECT_NEAR(bessel_k1(1.0), 0.6019072301972346, 1e-14);
  // The two-term asymptotic form gives 1.8666e-5 at x = 10; the integral is 1.864877e-5.
  EXPECT_NEAR(bessel_k1(10.0) / test::k1_quadrature(10.0), 1.0, 1e-10);
  EXPECT_NEAR(bessel_k1(10.0), 1.8648773453825585e-05, 1e-18);
}

TEST(BesselK1, AsymptoticSeriesAtTen) {
  const double x = 10.0;
  double series = 1.0, term = 1.0;
  // (4 - 1^2)(4 - 3^2)...(4 - (2k-1)^2) / (k! (8x)^k)
  for (int k = 1; k < 8; ++k) {
    term *= (4.0 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * x);
    series += term;
  }
  const double approx = std::sqrt(M_PI / (2.0 * x)) * std::exp(-x) * series;
  EXPECT_NEAR(bessel_k1(x) / approx, 1.0, 1e-7);
}

TEST(BesselK1, SmallArgumentLimit) { EXPECT_NEAR(1e-4 * bessel_k1(1e-4), 1.0, 1e-3); }

TEST(BesselK1, MatchesQuadratureOnLogGrid) {
  for (int i = 0; i < 200; ++i) {
    const double x = std::pow(10.0, -6.0 + i * (std::log10(50.0) + 6.0) / 199.0);
    const double ref = test::k1_quadrature(x);
    EXPECT_LT(std::abs(bessel_k1(x) - ref) / ref, 1e-8) << "x=" << x;
  }
}

TEST(BesselK1, StrictlyDecreasing) {
  double prev = bessel_k1(0.01);
  for (int i = 1; i <= 2000; ++i) {
    const double x = 0.01 + i * (20.0 - 0.01) / 2000.0;
    const double v = bessel_k1(x);
    ASSERT_LT(v, prev) << "x=" << x;
    prev = v;
  }
}

TEST(BesselK1, DomainErrors) {
  EXPECT_THROW(bessel_k1(0.0), DomainError);
  EXPECT_THROW(bessel_k1(-1.0), DomainError);
  EXPECT_THROW(bessel_k1(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(FiniteDiff, SquaredNorm) {
  const ScalarField f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  const Eigen::VectorXd g = finite_diff_gradient(f, Eigen::Vector2d(1, 2), 1e-5);
  EXPECT_NEAR(g[0], 2.0, 1e-6);
  EXPECT_NEAR(g[1], 4.0, 1e-6);
}

TEST(FiniteDiff, ConstantHasZeroGradient) {
  const ScalarField f = [](const Eigen::VectorXd&) { return 3.0; };
  EXPECT_EQ(finite_diff_gradient(f, Eigen::Vector3d(1, 2, 3), 1e-4), Eigen::VectorXd::Zero(3));
}

TEST(FiniteDiff, Sine) {
  const ScalarField f = [](const Eigen::VectorXd& x) { return std::sin(x[0]); };
  EXPECT_NEAR(finite_diff_gradient(f, Eigen::VectorXd::Constant(1, 0.3), 1e-5)[0], std::cos(0.3), 1e-7);
}

}  // namespace
}  // namespace sntl
