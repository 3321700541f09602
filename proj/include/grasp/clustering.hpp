#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "grasp/embeddings.hpp"

namespace grasp {

struct KMeansOptions {
  int max_iterations = 300;
  // Independent k-means++ seedings; the run with the lowest inertia wins.
  int restarts = 10;
};

struct ClusteringResult {
  std::vector<int> assignments;  // cluster id per row
  Eigen::MatrixXd centroids;     // k x d
  double inertia = 0.0;
  // Inertia after every assignment step of the winning run.
  std::vector<double> inertia_trace;
  int iterations = 0;

  int k() const { return static_cast<int>(centroids.rows()); }
  std::vector<std::vector<Eigen::Index>> members() const;
};

// Lloyd's algorithm with seeded k-means++ initialization. Stops when the
// assignments stop changing or after max_iterations. An emptied cluster is
// re-seeded with the point farthest from its centroid. Throws ContractError
// when k < 1 or k > rows.
ClusteringResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                        const KMeansOptions& options = {});
ClusteringResult kmeans(const EmbeddingMatrix& embedding, int k, std::uint64_t seed,
                        const KMeansOptions& options = {});

struct Representative {
  int cluster = 0;
  PageId page_id = 0;
  double distance = 0.0;  // to the cluster centroid
};

// One member per non-empty cluster: the one nearest its centroid, ties to the
// lowest page id. Ordered by cluster id.
std::vector<Representative> select_representatives(const EmbeddingMatrix& embedding,
                                                   const ClusteringResult& result);

}  // namespace grasp
