#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "grasp/embeddings.hpp"

namespace grasp {

// How per-cluster cohesion is averaged into intra_mean.
enum class IntraMode {
  kPerCluster,  // unweighted mean of each cluster's mean pairwise cosine
  kPooled,      // mean over all intra-cluster pairs
};

std::string_view to_string(IntraMode mode);
std::optional<IntraMode> parse_intra_mode(std::string_view name);

// Mean cosine over all unordered row pairs; zero rows contribute 0. Throws
// UndefinedMetricError for fewer than two rows.
double mean_pairwise_cosine(const Eigen::MatrixXd& vectors);

// 100 x mean pairwise cosine among the sampled pages' rows of `space`.
double s_sampled(const std::vector<PageId>& sample, const EmbeddingMatrix& space);

// 100 x mean intra-cluster cosine. `assignments[page_id]` is the cluster of
// each page; clusters with fewer than two members are skipped.
double intra_mean(const std::vector<int>& assignments, const EmbeddingMatrix& space,
                  IntraMode mode = IntraMode::kPerCluster);

double d_intra_inter(const std::vector<int>& assignments, const EmbeddingMatrix& space,
                     const std::vector<PageId>& sample, IntraMode mode = IntraMode::kPerCluster);

struct SpaceMetrics {
  std::string method_label;
  std::string space;
  double s_sampled = 0.0;
  double intra_mean = 0.0;
  double d_intra_inter = 0.0;
  std::size_t n_samples = 0;
  int k = 0;
};

SpaceMetrics evaluate_space(std::string method_label, const std::vector<int>& assignments,
                            const EmbeddingMatrix& space, const std::vector<PageId>& sample,
                            IntraMode mode = IntraMode::kPerCluster);

struct MetricsReport {
  std::vector<SpaceMetrics> rows;
  nlohmann::ordered_json notes = nlohmann::ordered_json::array();
};

nlohmann::ordered_json to_json(const SpaceMetrics& row);
nlohmann::ordered_json to_json(const MetricsReport& report);

}  // namespace grasp
