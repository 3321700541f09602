#include "grasp/structure_learning.hpp"

#include <algorithm>
#include <cmath>

#include "grasp/error.hpp"

namespace grasp {
namespace {

// Sentinels outside the cosine range: nothing / everything passes.
constexpr double kBelowAll = -2.0;
constexpr double kAboveAll = 2.0;

void check_assignments(const std::vector<int>& assignments, const EmbeddingMatrix& h_g,
                       const EdgeSet& edges) {
  if (static_cast<Eigen::Index>(assignments.size()) != h_g.rows()) {
    throw ContractError("cluster assignments must cover every node");
  }
  for (const auto& e : edges) {
    if (e.u >= assignments.size() || e.v >= assignments.size() || e.u >= e.v) {
      throw ContractError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                          ") is not a canonical edge over the node set");
    }
  }
}

std::vector<double> removal_candidates(const std::vector<int>& c, const Eigen::MatrixXd& h,
                                       const EdgeSet& edges) {
  std::vector<double> sims;
  for (const auto& e : edges) {
    if (c[e.u] != c[e.v]) sims.push_back(row_cosine(h, e.u, e.v));
  }
  return sims;
}

std::vector<double> recovery_candidates(const std::vector<int>& c, const Eigen::MatrixXd& h,
                                        const EdgeSet& edges) {
  std::vector<double> sims;
  const auto n = static_cast<PageId>(c.size());
  for (PageId u = 0; u < n; ++u) {
    for (PageId v = u + 1; v < n; ++v) {
      if (c[u] == c[v] && !edges.contains({u, v})) sims.push_back(row_cosine(h, u, v));
    }
  }
  return sims;
}

}  // namespace

std::string_view to_string(ThresholdMode mode) {
  return mode == ThresholdMode::kAbsolute ? "absolute" : "quantile";
}

std::optional<ThresholdMode> parse_threshold_mode(std::string_view name) {
  if (name == "absolute") return ThresholdMode::kAbsolute;
  if (name == "quantile") return ThresholdMode::kQuantile;
  return std::nullopt;
}

std::string_view to_string(RefineMode mode) {
  return mode == RefineMode::kUnion ? "union" : "intersection";
}

std::optional<RefineMode> parse_refine_mode(std::string_view name) {
  if (name == "union") return RefineMode::kUnion;
  if (name == "intersection") return RefineMode::kIntersection;
  return std::nullopt;
}

void RefinementParams::validate() const {
  if (threshold_mode == ThresholdMode::kAbsolute) {
    if (gamma < -1.0 || gamma > 1.0 || beta < -1.0 || beta > 1.0) {
      throw ContractError("absolute thresholds gamma and beta must lie in [-1, 1]");
    }
    if (beta < gamma) throw ContractError("beta must be >= gamma");
  } else if (gamma < 0.0 || gamma > 1.0 || beta < 0.0 || beta > 1.0) {
    throw ContractError("quantile thresholds gamma and beta must lie in [0, 1]");
  }
  if (iterations < 0) throw ContractError("iterations must be >= 0");
  if (k < 1) throw ContractError("k must be >= 1");
}

EdgeSet undirected_edges(const LinkGraph& graph) {
  EdgeSet out;
  for (const auto& e : graph.edges()) out.insert(make_edge(e.src, e.dst));
  return out;
}

SparseMatrix adjacency_from_edges(const EdgeSet& edges, std::size_t n) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    if (e.v >= n) throw ContractError("edge endpoint outside the node set");
    triplets.emplace_back(e.u, e.v, 1.0);
    triplets.emplace_back(e.v, e.u, 1.0);
  }
  SparseMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

double row_cosine(const Eigen::MatrixXd& h, Eigen::Index a, Eigen::Index b) {
  const double na = h.row(a).norm();
  const double nb = h.row(b).norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return h.row(a).dot(h.row(b)) / (na * nb);
}

EdgeSet compute_removal_set(const std::vector<int>& assignments, const EmbeddingMatrix& h_g,
                            const EdgeSet& edges, double gamma) {
  check_assignments(assignments, h_g, edges);
  const Eigen::MatrixXd h = h_g.to_double();
  EdgeSet out;
  for (const auto& e : edges) {
    if (assignments[e.u] != assignments[e.v] && row_cosine(h, e.u, e.v) < gamma) out.insert(e);
  }
  return out;
}

EdgeSet compute_recovery_set(const std::vector<int>& assignments, const EmbeddingMatrix& h_g,
                             const EdgeSet& edges, double beta) {
  check_assignments(assignments, h_g, edges);
  const Eigen::MatrixXd h = h_g.to_double();
  EdgeSet out;
  const auto n = static_cast<PageId>(assignments.size());
  for (PageId u = 0; u < n; ++u) {
    for (PageId v = u + 1; v < n; ++v) {
      if (assignments[u] == assignments[v] && !edges.contains({u, v}) &&
          row_cosine(h, u, v) > beta) {
        out.insert({u, v});
      }
    }
  }
  return out;
}

double removal_threshold_at_quantile(const std::vector<int>& assignments,
                                     const EmbeddingMatrix& h_g, const EdgeSet& edges,
                                     double fraction) {
  check_assignments(assignments, h_g, edges);
  auto sims = removal_candidates(assignments, h_g.to_double(), edges);
  const auto m = sims.size();
  const auto take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(m)));
  if (take == 0) return kBelowAll;
  if (take >= m) return kAboveAll;
  std::sort(sims.begin(), sims.end());
  return sims[take];
}

double recovery_threshold_at_quantile(const std::vector<int>& assignments,
                                      const EmbeddingMatrix& h_g, const EdgeSet& edges,
                                      double fraction) {
  check_assignments(assignments, h_g, edges);
  auto sims = recovery_candidates(assignments, h_g.to_double(), edges);
  const auto m = sims.size();
  const auto take =
      static_cast<std::size_t>(std::ceil((1.0 - fraction) * static_cast<double>(m)));
  if (take == 0) return kAboveAll;
  if (take >= m) return kBelowAll;
  std::sort(sims.begin(), sims.end());
  return sims[m - take - 1];
}

EdgeSet refine_edges(const EdgeSet& edges, const EdgeSet& recovery, const EdgeSet& removal,
                     RefineMode mode) {
  for (const auto& e : removal) {
    if (!edges.contains(e)) {
      throw ContractError("removal edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                          ") is not in the current edge set");
    }
  }
  for (const auto& e : recovery) {
    if (edges.contains(e)) {
      throw ContractError("recovery edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                          ") is already in the current edge set");
    }
  }
  EdgeSet merged;
  if (mode == RefineMode::kUnion) {
    std::set_union(edges.begin(), edges.end(), recovery.begin(), recovery.end(),
                   std::inserter(merged, merged.end()));
  } else {
    std::set_intersection(edges.begin(), edges.end(), recovery.begin(), recovery.end(),
                          std::inserter(merged, merged.end()));
  }
  EdgeSet out;
  std::set_difference(merged.begin(), merged.end(), removal.begin(), removal.end(),
                      std::inserter(out, out.end()));
  return out;
}

GraspResult grasp_iterate(const EdgeSet& initial_edges, const EmbeddingMatrix& features,
                          const RefinementParams& params, const PropagationParams& propagation) {
  params.validate();
  propagation.validate();
  const auto n = static_cast<std::size_t>(features.rows());
  for (std::size_t i = 0; i < n; ++i) {
    if (features.ids()[i] != i) {
      throw ContractError("feature rows must be ordered by node index");
    }
  }
  GraspResult result;
  EdgeSet edges = initial_edges;
  const auto pass = [&](const EdgeSet& current) {
    const auto normalized = normalize_adjacency(adjacency_from_edges(current, n), propagation.norm);
    result.h_g = propagate(features, normalized, propagation);
    result.clustering = kmeans(result.h_g, params.k, params.seed, params.kmeans);
  };

  for (int it = 0; it < params.iterations; ++it) {
    pass(edges);
    const auto& c = result.clustering.assignments;
    IterationStats stats;
    if (params.threshold_mode == ThresholdMode::kAbsolute) {
      stats.removal_threshold = params.gamma;
      stats.recovery_threshold = params.beta;
    } else {
      stats.removal_threshold = removal_threshold_at_quantile(c, result.h_g, edges, params.gamma);
      stats.recovery_threshold = recovery_threshold_at_quantile(c, result.h_g, edges, params.beta);
    }
    stats.removed = compute_removal_set(c, result.h_g, edges, stats.removal_threshold);
    stats.recovered = compute_recovery_set(c, result.h_g, edges, stats.recovery_threshold);
    edges = refine_edges(edges, stats.recovered, stats.removed, params.refine_mode);
    stats.edges_after = edges.size();
    if (edges.empty() && !initial_edges.empty()) {
      result.warnings.push_back("iteration " + std::to_string(it + 1) +
                                ": refined graph has no edges; propagation reduces to self-loops");
    }
    result.history.push_back(std::move(stats));
  }
  pass(edges);
  result.final_edges = std::move(edges);
  return result;
}

GraspResult grasp_iterate(const Corpus& corpus, const EmbeddingMatrix& features,
                          const RefinementParams& params, const PropagationParams& propagation) {
  if (static_cast<std::size_t>(features.rows()) != corpus.size()) {
    throw ContractError("features have " + std::to_string(features.rows()) +
                        " rows but the corpus has " + std::to_string(corpus.size()) + " pages");
  }
  return grasp_iterate(undirected_edges(corpus.graph), features, params, propagation);
}

}  // namespace grasp
