#include <gtest/gtest.h>

#include <set>

#include "grasp/clustering.hpp"
#include "grasp/error.hpp"
#include "test_util.hpp"

namespace grasp {
namespace {

using testing::matrix_from_rows;

TEST(KMeans, SeparatedPairs) {
  Eigen::MatrixXd x(4, 1);
  x << 0, 0.1, 10, 10.1;
  const auto r = kmeans(x, 2, 1);
  EXPECT_EQ(r.assignments[0], r.assignments[1]);
  EXPECT_EQ(r.assignments[2], r.assignments[3]);
  EXPECT_NE(r.assignments[0], r.assignments[2]);
  std::set<double> centroids = {r.centroids(0, 0), r.centroids(1, 0)};
  EXPECT_NEAR(*centroids.begin(), 0.05, 1e-12);
  EXPECT_NEAR(*centroids.rbegin(), 10.05, 1e-12);
}

TEST(KMeans, KEqualsN) {
  std::mt19937_64 rng(1);
  const auto e = testing::random_matrix(rng, 7, 3);
  const auto r = kmeans(e, 7, 3);
  EXPECT_NEAR(r.inertia, 0.0, 1e-12);
  EXPECT_EQ(std::set<int>(r.assignments.begin(), r.assignments.end()).size(), 7u);
}

TEST(KMeans, KGreaterThanN) {
  Eigen::MatrixXd x(2, 1);
  x << 0, 1;
  EXPECT_THROW(kmeans(x, 3, 0), ContractError);
  EXPECT_THROW(kmeans(x, 0, 0), ContractError);
}

TEST(KMeans, CentroidsAreMemberMeans) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const auto e = testing::random_matrix(rng, 40, 4);
    const auto r = kmeans(e, 5, rng());
    const auto x = e.to_double();
    const auto members = r.members();
    for (int c = 0; c < r.k(); ++c) {
      ASSERT_FALSE(members[static_cast<std::size_t>(c)].empty());
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(4);
      for (const auto i : members[static_cast<std::size_t>(c)]) mean += x.row(i);
      mean /= static_cast<double>(members[static_cast<std::size_t>(c)].size());
      EXPECT_TRUE(mean.isApprox(r.centroids.row(c), 1e-6));
    }
  }
}

TEST(KMeans, InertiaNonIncreasing) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto e = testing::random_matrix(rng, 60, 3);
    const auto r = kmeans(e, 6, rng());
    ASSERT_FALSE(r.inertia_trace.empty());
    for (std::size_t i = 1; i < r.inertia_trace.size(); ++i) {
      EXPECT_LE(r.inertia_trace[i], r.inertia_trace[i - 1] + 1e-9);
    }
    EXPECT_NEAR(r.inertia_trace.back(), r.inertia, 1e-9);
  }
}

TEST(KMeans, DeterministicGivenSeed) {
  std::mt19937_64 rng(4);
  const auto e = testing::random_matrix(rng, 50, 5);
  const auto a = kmeans(e, 7, 99);
  const auto b = kmeans(e, 7, 99);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.centroids, b.centroids);
}

TEST(KMeans, DuplicatePointsFillEveryCluster) {
  // Fewer distinct points than clusters forces the empty-cluster path.
  Eigen::MatrixXd x(6, 1);
  x << 0, 0, 0, 0, 5, 5;
  const auto r = kmeans(x, 3, 0);
  EXPECT_EQ(r.k(), 3);
  for (const auto& m : r.members()) EXPECT_FALSE(m.empty());
}

// All 2-partitions of six points, minimum within-cluster sum of squares.
double brute_force_two_means(const Eigen::MatrixXd& x) {
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < 32; ++mask) {
    double total = 0.0;
    for (int side = 0; side < 2; ++side) {
      std::vector<int> rows;
      for (int i = 0; i < 6; ++i) {
        if (((mask >> i) & 1) == side) rows.push_back(i);
      }
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(x.cols());
      for (int i : rows) mean += x.row(i);
      mean /= static_cast<double>(rows.size());
      for (int i : rows) total += (x.row(i) - mean).squaredNorm();
    }
    best = std::min(best, total);
  }
  return best;
}

TEST(KMeans, WellSeparatedSixPointsMatchEnumeration) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 0.3);
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd x(6, 2);
    for (int i = 0; i < 6; ++i) {
      const double cx = i < 3 ? 0.0 : 5.0;
      x(i, 0) = cx + g(rng);
      x(i, 1) = g(rng);
    }
    EXPECT_NEAR(kmeans(x, 2, rng()).inertia, brute_force_two_means(x), 1e-9);
  }
}

TEST(SelectRepresentatives, ExactCentroidHit) {
  const auto e = matrix_from_rows({{0, 0}, {1, 1}, {2, 2}});
  ClusteringResult r;
  r.assignments = {0, 0, 0};
  r.centroids = Eigen::MatrixXd(1, 2);
  r.centroids << 1, 1;
  const auto reps = select_representatives(e, r);
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_EQ(reps[0].page_id, 1u);
  EXPECT_EQ(reps[0].distance, 0.0);
}

TEST(SelectRepresentatives, TieGoesToLowestPageId) {
  RowMatrixF d(2, 1);
  d << 2, 0;
  // Row order deliberately puts the higher id first.
  const EmbeddingMatrix e({9, 4}, d, Space::kText);
  ClusteringResult r;
  r.assignments = {0, 0};
  r.centroids = Eigen::MatrixXd::Constant(1, 1, 1.0);
  EXPECT_EQ(select_representatives(e, r)[0].page_id, 4u);
}

TEST(SelectRepresentatives, SkipsEmptyClustersAndMembersOwnCluster) {
  std::mt19937_64 rng(6);
  const auto e = testing::random_matrix(rng, 30, 3);
  auto r = kmeans(e, 4, 1);
  // Add a cluster nobody belongs to.
  r.centroids.conservativeResize(5, Eigen::NoChange);
  r.centroids.row(4).setConstant(100.0);
  const auto reps = select_representatives(e, r);
  EXPECT_EQ(reps.size(), 4u);
  for (const auto& rep : reps) {
    EXPECT_EQ(r.assignments[*e.row_of(rep.page_id)], rep.cluster);
  }
}

TEST(SelectRepresentatives, RowPermutationKeepsSelection) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto e = testing::random_matrix(rng, 25, 3);
    const auto r = kmeans(e, 4, rng());
    std::vector<PageId> perm(e.ids());
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto ep = e.aligned_to(perm);
    ClusteringResult rp = r;
    for (std::size_t i = 0; i < perm.size(); ++i) rp.assignments[i] = r.assignments[perm[i]];
    std::set<PageId> a;
    std::set<PageId> b;
    for (const auto& rep : select_representatives(e, r)) a.insert(rep.page_id);
    for (const auto& rep : select_representatives(ep, rp)) b.insert(rep.page_id);
    EXPECT_EQ(a, b);
  }
}

}  // namespace
}  // namespace grasp
