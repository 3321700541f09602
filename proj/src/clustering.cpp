#include "grasp/clustering.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "grasp/error.hpp"

namespace grasp {
namespace {

struct Run {
  std::vector<int> assignments;
  Eigen::MatrixXd centroids;
  double inertia = 0.0;
  std::vector<double> trace;
  int iterations = 0;
};

Eigen::MatrixXd plus_plus_init(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
  const auto n = x.rows();
  Eigen::MatrixXd centroids(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centroids.row(0) = x.row(pick(rng));
  Eigen::VectorXd d2 = (x.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= d2(i);
        if (target < 0.0 && d2(i) > 0.0) {
          chosen = i;
          break;
        }
      }
      // Guard against rounding landing on an already-chosen point.
      while (d2(chosen) == 0.0 && chosen > 0) --chosen;
    } else {
      chosen = pick(rng);
    }
    centroids.row(c) = x.row(chosen);
    d2 = d2.cwiseMin((x.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

double assign(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centroids, std::vector<int>& out) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (x.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    out[static_cast<std::size_t>(i)] = best_c;
    inertia += best;
  }
  return inertia;
}

void update_centroids(const Eigen::MatrixXd& x, std::vector<int>& assignments,
                      Eigen::MatrixXd& centroids) {
  const auto k = centroids.rows();
  for (;;) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int c = assignments[static_cast<std::size_t>(i)];
      sums.row(c) += x.row(i);
      ++counts(c);
    }
    Eigen::Index empty = -1;
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts(c) > 0) {
        centroids.row(c) = sums.row(c) / counts(c);
      } else if (empty < 0) {
        empty = c;
      }
    }
    if (empty < 0) return;
    // Move the point farthest from its centroid (in a cluster that can spare
    // it) into the empty cluster, then recompute.
    double worst = -1.0;
    Eigen::Index victim = -1;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int c = assignments[static_cast<std::size_t>(i)];
      if (counts(c) < 2) continue;
      const double d = (x.row(i) - centroids.row(c)).squaredNorm();
      if (d > worst) {
        worst = d;
        victim = i;
      }
    }
    if (victim < 0) return;  // unreachable while k <= n
    assignments[static_cast<std::size_t>(victim)] = static_cast<int>(empty);
  }
}

Run lloyd(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng, int max_iterations) {
  Run run;
  run.centroids = plus_plus_init(x, k, rng);
  run.assignments.assign(static_cast<std::size_t>(x.rows()), -1);
  std::vector<int> next(run.assignments.size());
  bool converged = false;
  for (int it = 0; it < max_iterations; ++it) {
    run.inertia = assign(x, run.centroids, next);
    run.trace.push_back(run.inertia);
    run.iterations = it + 1;
    if (next == run.assignments) {
      converged = true;
      break;
    }
    run.assignments = next;
    update_centroids(x, run.assignments, run.centroids);
  }
  if (!converged) {
    // Iteration cap hit: make centroids the member means of the final
    // assignment and report the matching inertia.
    run.inertia = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      run.inertia +=
          (x.row(i) - run.centroids.row(run.assignments[static_cast<std::size_t>(i)]))
              .squaredNorm();
    }
  }
  return run;
}

}  // namespace

std::vector<std::vector<Eigen::Index>> ClusteringResult::members() const {
  std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(k()));
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    out[static_cast<std::size_t>(assignments[i])].push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

ClusteringResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                        const KMeansOptions& options) {
  if (k < 1) throw ContractError("k-means needs k >= 1");
  if (k > points.rows()) {
    throw ContractError("k-means needs k <= n (k=" + std::to_string(k) +
                        ", n=" + std::to_string(points.rows()) + ")");
  }
  if (options.max_iterations < 1 || options.restarts < 1) {
    throw ContractError("k-means needs max_iterations >= 1 and restarts >= 1");
  }
  std::mt19937_64 rng(seed);
  Run best;
  bool have_best = false;
  for (int r = 0; r < options.restarts; ++r) {
    Run run = lloyd(points, k, rng, options.max_iterations);
    if (!have_best || run.inertia < best.inertia) {
      best = std::move(run);
      have_best = true;
    }
  }
  ClusteringResult result;
  result.assignments = std::move(best.assignments);
  result.centroids = std::move(best.centroids);
  result.inertia = best.inertia;
  result.inertia_trace = std::move(best.trace);
  result.iterations = best.iterations;
  return result;
}

ClusteringResult kmeans(const EmbeddingMatrix& embedding, int k, std::uint64_t seed,
                        const KMeansOptions& options) {
  return kmeans(embedding.to_double(), k, seed, options);
}

std::vector<Representative> select_representatives(const EmbeddingMatrix& embedding,
                                                   const ClusteringResult& result) {
  if (static_cast<Eigen::Index>(result.assignments.size()) != embedding.rows()) {
    throw ContractError("clustering does not cover the embedding rows");
  }
  if (result.centroids.cols() != embedding.cols()) {
    throw ContractError("centroid dimension differs from the embedding dimension");
  }
  const Eigen::MatrixXd x = embedding.to_double();
  const auto& ids = embedding.ids();
  std::vector<Representative> reps;
  const auto members = result.members();
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].empty()) continue;
    Representative best{static_cast<int>(c), 0, std::numeric_limits<double>::infinity()};
    double best_sq = std::numeric_limits<double>::infinity();
    for (const auto row : members[c]) {
      const double sq = (x.row(row) - result.centroids.row(static_cast<Eigen::Index>(c)))
                            .squaredNorm();
      const PageId id = ids[static_cast<std::size_t>(row)];
      if (sq < best_sq || (sq == best_sq && id < best.page_id)) {
        best_sq = sq;
        best.page_id = id;
      }
    }
    best.distance = std::sqrt(best_sq);
    reps.push_back(best);
  }
  return reps;
}

}  // namespace grasp
