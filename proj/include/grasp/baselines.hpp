#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "grasp/corpus.hpp"
#include "grasp/embeddings.hpp"

namespace grasp {

// Statistical page representations used by the structure-derived clustering
// baseline. Definitions are versioned via kSdcVersion and echoed in reports.
enum class SdcKind { kContent, kStructure, kStrucCont, kTags, kTree };

inline constexpr std::string_view kSdcVersion = "sdc-v1";
inline constexpr std::size_t kContentVocabulary = 1000;
inline constexpr std::size_t kStructureVocabulary = 500;
inline constexpr std::size_t kBranchingBuckets = 8;

std::string_view to_string(SdcKind kind);
std::optional<SdcKind> parse_sdc_kind(std::string_view name);

struct DomStatistics {
  std::map<std::string, int> tag_counts;
  std::map<std::string, int> tag_bigrams;  // "parent>child"
  std::map<std::string, int> word_counts;  // lowercased visible text
  int max_depth = 0;
  int node_count = 0;
  std::array<int, kBranchingBuckets> branching{};  // last bucket is "7 or more"
};

DomStatistics dom_statistics(std::string_view dom);

// Unnormalized feature counts with column labels.
struct FeatureTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;
};

FeatureTable sdc_feature_table(const std::vector<DomStatistics>& pages, SdcKind kind);

// Row-L2-normalized statistical features, one row per corpus page.
EmbeddingMatrix sdc_features(const Corpus& corpus, SdcKind kind);

struct PcaResult {
  EmbeddingMatrix projected;
  Eigen::MatrixXd components;  // d x target_dim, orthonormal columns
  Eigen::RowVectorXd mean;
  Eigen::VectorXd explained_variance_ratio;  // per kept component
};

// Centered PCA. Each component's sign is fixed so that its largest-magnitude
// loading is positive. Throws ContractError if target_dim is outside [1, d].
PcaResult pca(const EmbeddingMatrix& embedding, int target_dim);
EmbeddingMatrix pca_reduce(const EmbeddingMatrix& embedding, int target_dim);

}  // namespace grasp
