#include <gtest/gtest.h>

#include "support.hpp"

using namespace testing_support;
using sememe::Matrix;
using sememe::SememeSpace;
using sememe::Vector;

TEST(Assign, ExactCentroidAndOneHot) {
  CounterRng rng(1);
  const SememeSpace space{random_normal(4, 6, rng)};
  for (std::size_t k = 0; k < 6; ++k) {
    const auto a = sememe::assign(space.centroid(k), space);
    EXPECT_EQ(a.index, k);
    EXPECT_EQ(a.s.sum(), 1.0);
    EXPECT_EQ(a.s(static_cast<Eigen::Index>(k)), 1.0);
  }
}

TEST(Assign, TieGoesToLowerIndex) {
  Matrix m(1, 2);
  m << 1.0, 4.0;
  Vector z(1);
  z << 2.5;
  EXPECT_EQ(sememe::assign(z, SememeSpace{m}).index, 0u);
  m << 4.0, 1.0;
  EXPECT_EQ(sememe::assign(z, SememeSpace{m}).index, 0u);
}

TEST(Assign, MatchesBruteForceAndIsScaleInvariant) {
  CounterRng rng(2);
  for (int t = 0; t < 300; ++t) {
    const SememeSpace space{random_normal(5, 32, rng)};
    const Vector z = random_normal(5, 1, rng).col(0);
    const auto k = sememe::assign(z, space).index;
    EXPECT_EQ(k, brute_force_nearest(z, space.m));
    const double c = std::ldexp(1.0, static_cast<int>(rng.below(20)) - 10);
    EXPECT_EQ(sememe::assign(c * z, SememeSpace{c * space.m}).index, k);
  }
}

TEST(Assign, Errors) {
  EXPECT_THROW(sememe::assign(Vector::Zero(3), SememeSpace{Matrix::Zero(2, 4)}), sememe::Error);
  EXPECT_THROW(sememe::assign(Vector::Zero(2), SememeSpace{Matrix::Zero(2, 0)}), sememe::Error);
}

TEST(ClusteringLoss, HandExamples) {
  Matrix m(2, 2);
  m << 0, 3, 0, 4;
  const SememeSpace space{m};
  Matrix z(1, 2);
  z << 3, 4;
  EXPECT_EQ(sememe::clustering_loss(z, space, {0}), 25.0);
  EXPECT_EQ(sememe::clustering_loss(z, space, {1}), 0.0);
  Matrix three(3, 2);
  three << 1, 0, 0, 2, 3, 5;
  // 1 + 4 + 1, averaged.
  EXPECT_EQ(sememe::clustering_loss(three, space, {0, 0, 1}), 2.0);
  EXPECT_THROW(sememe::clustering_loss(three, space, {0, 2, 1}), sememe::Error);
  EXPECT_THROW(sememe::clustering_loss(three, space, {0}), sememe::Error);
}

TEST(UpdateCentroids, Recurrence) {
  Matrix m = Matrix::Zero(2, 2);
  SememeSpace space{m};
  std::vector<double> counts{0.0, 0.0};
  // First assignment with a zero count lands exactly on the sample.
  sememe::update_centroids(space, counts, Vector::Constant(2, 6.0), 1);
  EXPECT_EQ(space.centroid(1), Vector::Constant(2, 6.0));
  EXPECT_EQ(counts[1], 1.0);
  // Second: 6 - (6 - 0) / 2 = 3.
  sememe::update_centroids(space, counts, Vector::Zero(2), 1);
  EXPECT_EQ(space.centroid(1), Vector::Constant(2, 3.0));
  EXPECT_TRUE(space.centroid(0).isZero());
  // A sample equal to the centroid leaves it fixed.
  sememe::update_centroids(space, counts, Vector::Constant(2, 3.0), 1);
  EXPECT_EQ(space.centroid(1), Vector::Constant(2, 3.0));
  EXPECT_EQ(counts[1], 3.0);
}

TEST(UpdateCentroids, StartingFromCountsIsARunningMean) {
  CounterRng rng(3);
  SememeSpace space{Matrix::Zero(3, 1)};
  std::vector<double> counts{0.0};
  const Matrix xs = random_normal(50, 3, rng);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) sememe::update_centroids(space, counts, xs.row(i).transpose(), 0);
  EXPECT_LE((space.centroid(0) - xs.colwise().mean().transpose()).norm(), 1e-12);
}

TEST(KMeans, TwoPairs) {
  Matrix x(4, 2);
  x << 0, 0, 0, 1, 10, 10, 10, 11;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto res = sememe::kmeans(x, 2, 100, seed);
    std::vector<Vector> c{res.space.centroid(0), res.space.centroid(1)};
    std::sort(c.begin(), c.end(), [](const Vector& a, const Vector& b) { return a(0) < b(0); });
    EXPECT_EQ(c[0], (Vector(2) << 0, 0.5).finished());
    EXPECT_EQ(c[1], (Vector(2) << 10, 10.5).finished());
    EXPECT_EQ(res.labels[0], res.labels[1]);
    EXPECT_EQ(res.labels[2], res.labels[3]);
    EXPECT_NE(res.labels[0], res.labels[2]);
  }
}

TEST(KMeans, SingleClusterIsTheMean) {
  CounterRng rng(4);
  const Matrix x = random_normal(30, 4, rng);
  const auto res = sememe::kmeans(x, 1, 100, 1);
  EXPECT_LE((res.space.centroid(0) - x.colwise().mean().transpose()).norm(), 1e-12);
}

TEST(KMeans, KEqualsNGivesZeroCost) {
  CounterRng rng(5);
  const Matrix x = random_normal(12, 3, rng);
  const auto res = sememe::kmeans(x, 12, 100, 2);
  EXPECT_NEAR(res.costs.back(), 0.0, 1e-20);
  std::vector<std::size_t> labels = res.labels;
  std::sort(labels.begin(), labels.end());
  EXPECT_EQ(std::unique(labels.begin(), labels.end()), labels.end());
}

TEST(KMeans, CostsNeverIncreaseAndDeterministic) {
  CounterRng rng(6);
  for (int t = 0; t < 30; ++t) {
    const auto data = gaussian_mixture(1 + rng.below(6), 10 + rng.below(40), 3, 0.5, 0.0, rng);
    const std::size_t k = 1 + rng.below(8);
    const auto res = sememe::kmeans(data.x, k, 100, static_cast<std::uint64_t>(t));
    for (std::size_t i = 1; i < res.costs.size(); ++i) EXPECT_LE(res.costs[i], res.costs[i - 1]);
    const auto again = sememe::kmeans(data.x, k, 100, static_cast<std::uint64_t>(t));
    EXPECT_EQ(res.space, again.space);
    EXPECT_EQ(res.labels, again.labels);
  }
}

TEST(KMeans, LabelsAreNearestCentroids) {
  CounterRng rng(7);
  const auto data = gaussian_mixture(4, 50, 5, 0.2, 1.0, rng);
  const auto res = sememe::kmeans(data.x, 4, 100, 3);
  EXPECT_EQ(res.labels, sememe::assign_rows(data.x, res.space));
  EXPECT_EQ(best_permutation_accuracy(res.labels, data.labels, 4), 1.0);
}

TEST(KMeans, TooFewPointsIsDegenerate) {
  try {
    sememe::kmeans(Matrix::Ones(3, 2), 4, 10, 1);
    FAIL();
  } catch (const sememe::Error& e) {
    EXPECT_EQ(e.kind(), sememe::ErrorKind::kDegenerate);
  }
}

TEST(KMeans, DuplicatePointsStillFillEveryCluster) {
  Matrix x = Matrix::Zero(6, 2);
  x.row(5) << 1, 1;
  const auto res = sememe::kmeans(x, 3, 50, 9);
  EXPECT_TRUE(res.space.m.allFinite());
  EXPECT_EQ(res.costs.back(), 0.0);
}
