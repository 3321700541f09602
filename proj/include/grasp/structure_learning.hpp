#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "grasp/clustering.hpp"
#include "grasp/corpus.hpp"
#include "grasp/embeddings.hpp"
#include "grasp/graph.hpp"

namespace grasp {

// Undirected edge stored with u < v.
struct Edge {
  PageId u = 0;
  PageId v = 0;
  auto operator<=>(const Edge&) const = default;
};

inline Edge make_edge(PageId a, PageId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

using EdgeSet = std::set<Edge>;

EdgeSet undirected_edges(const LinkGraph& graph);
SparseMatrix adjacency_from_edges(const EdgeSet& edges, std::size_t n);

enum class ThresholdMode {
  kAbsolute,  // gamma/beta are cosine values in [-1, 1]
  kQuantile,  // gamma/beta are fractions in [0, 1] of the candidate distribution
};

enum class RefineMode {
  kUnion,         // (E_A ∪ E_rc) \ E_rm
  kIntersection,  // (E_A ∩ E_rc) \ E_rm, the formula exactly as printed
};

std::string_view to_string(ThresholdMode mode);
std::optional<ThresholdMode> parse_threshold_mode(std::string_view name);
std::string_view to_string(RefineMode mode);
std::optional<RefineMode> parse_refine_mode(std::string_view name);

struct RefinementParams {
  double gamma = 0.3;  // removal threshold
  double beta = 0.95;  // recovery threshold
  int iterations = 5;
  int k = 20;
  std::uint64_t seed = 0;
  ThresholdMode threshold_mode = ThresholdMode::kAbsolute;
  RefineMode refine_mode = RefineMode::kUnion;
  KMeansOptions kmeans;

  void validate() const;
};

// Cosine similarity of two rows; 0 if either is a zero vector.
double row_cosine(const Eigen::MatrixXd& h, Eigen::Index a, Eigen::Index b);

// Existing edges joining different clusters whose endpoint cosine is < gamma.
EdgeSet compute_removal_set(const std::vector<int>& assignments, const EmbeddingMatrix& h_g,
                            const EdgeSet& edges, double gamma);

// Non-adjacent same-cluster pairs whose cosine is > beta.
EdgeSet compute_recovery_set(const std::vector<int>& assignments, const EmbeddingMatrix& h_g,
                             const EdgeSet& edges, double beta);

// Absolute cosine thresholds equivalent to removing the lowest `fraction` of
// cross-cluster edges, or recovering the top (1 - fraction) of same-cluster
// non-adjacent pairs.
double removal_threshold_at_quantile(const std::vector<int>& assignments,
                                     const EmbeddingMatrix& h_g, const EdgeSet& edges,
                                     double fraction);
double recovery_threshold_at_quantile(const std::vector<int>& assignments,
                                      const EmbeddingMatrix& h_g, const EdgeSet& edges,
                                      double fraction);

// Throws ContractError unless removal ⊆ edges and recovery ∩ edges = ∅.
EdgeSet refine_edges(const EdgeSet& edges, const EdgeSet& recovery, const EdgeSet& removal,
                     RefineMode mode = RefineMode::kUnion);

struct IterationStats {
  double removal_threshold = 0.0;
  double recovery_threshold = 0.0;
  EdgeSet removed;
  EdgeSet recovered;
  std::size_t edges_after = 0;
};

struct GraspResult {
  EmbeddingMatrix h_g;
  ClusteringResult clustering;
  EdgeSet final_edges;
  std::vector<IterationStats> history;
  std::vector<std::string> warnings;
};

// Repeats normalize -> propagate -> k-means -> refine `iterations` times,
// then returns a final propagate + k-means pass on the refined graph.
// Feature rows must be ordered by node index 0..n-1.
GraspResult grasp_iterate(const EdgeSet& initial_edges, const EmbeddingMatrix& features,
                          const RefinementParams& params, const PropagationParams& propagation);
GraspResult grasp_iterate(const Corpus& corpus, const EmbeddingMatrix& features,
                          const RefinementParams& params, const PropagationParams& propagation);

}  // namespace grasp
