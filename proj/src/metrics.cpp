#include "grasp/metrics.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "grasp/error.hpp"

namespace grasp {
namespace {

Eigen::MatrixXd gather_rows(const EmbeddingMatrix& space, const std::vector<PageId>& ids) {
  std::unordered_map<PageId, Eigen::Index> row;
  for (std::size_t i = 0; i < space.ids().size(); ++i) {
    row.emplace(space.ids()[i], static_cast<Eigen::Index>(i));
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), space.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto it = row.find(ids[i]);
    if (it == row.end()) {
      throw ReferentialError("page " + std::to_string(ids[i]) + " has no row in the " +
                             std::string(to_string(space.space())) + " space");
    }
    out.row(static_cast<Eigen::Index>(i)) = space.data().row(it->second).cast<double>();
  }
  return out;
}

// Sum of pairwise cosines and number of pairs.
std::pair<double, std::size_t> pairwise_cosine_sum(const Eigen::MatrixXd& v) {
  const auto n = v.rows();
  Eigen::VectorXd norms = v.rowwise().norm();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (norms(i) > 0.0 && norms(j) > 0.0) sum += v.row(i).dot(v.row(j)) / (norms(i) * norms(j));
    }
  }
  const auto count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  return {sum, count};
}

std::map<int, std::vector<PageId>> groups_of(const std::vector<int>& assignments,
                                             const EmbeddingMatrix& space) {
  std::map<int, std::vector<PageId>> groups;
  for (const auto id : space.ids()) {
    if (id >= assignments.size()) {
      throw ReferentialError("page " + std::to_string(id) + " has no cluster assignment");
    }
    groups[assignments[id]].push_back(id);
  }
  return groups;
}

}  // namespace

std::string_view to_string(IntraMode mode) {
  return mode == IntraMode::kPerCluster ? "per-cluster" : "pooled";
}

std::optional<IntraMode> parse_intra_mode(std::string_view name) {
  if (name == "per-cluster") return IntraMode::kPerCluster;
  if (name == "pooled") return IntraMode::kPooled;
  return std::nullopt;
}

double mean_pairwise_cosine(const Eigen::MatrixXd& vectors) {
  if (vectors.rows() < 2) {
    throw UndefinedMetricError("mean pairwise cosine needs at least 2 vectors, got " +
                               std::to_string(vectors.rows()));
  }
  const auto [sum, count] = pairwise_cosine_sum(vectors);
  return sum / static_cast<double>(count);
}

double s_sampled(const std::vector<PageId>& sample, const EmbeddingMatrix& space) {
  if (sample.size() < 2) {
    throw UndefinedMetricError("S_sampled needs at least 2 sampled pages, got " +
                               std::to_string(sample.size()));
  }
  return 100.0 * mean_pairwise_cosine(gather_rows(space, sample));
}

double intra_mean(const std::vector<int>& assignments, const EmbeddingMatrix& space,
                  IntraMode mode) {
  double total = 0.0;
  std::size_t terms = 0;
  for (const auto& [cluster, members] : groups_of(assignments, space)) {
    if (members.size() < 2) continue;
    const auto [sum, count] = pairwise_cosine_sum(gather_rows(space, members));
    if (mode == IntraMode::kPerCluster) {
      total += sum / static_cast<double>(count);
      ++terms;
    } else {
      total += sum;
      terms += count;
    }
  }
  if (terms == 0) {
    throw UndefinedMetricError("intra-cluster similarity needs a cluster with >= 2 members");
  }
  return 100.0 * total / static_cast<double>(terms);
}

double d_intra_inter(const std::vector<int>& assignments, const EmbeddingMatrix& space,
                     const std::vector<PageId>& sample, IntraMode mode) {
  return intra_mean(assignments, space, mode) - s_sampled(sample, space);
}

SpaceMetrics evaluate_space(std::string method_label, const std::vector<int>& assignments,
                            const EmbeddingMatrix& space, const std::vector<PageId>& sample,
                            IntraMode mode) {
  SpaceMetrics m;
  m.method_label = std::move(method_label);
  m.space = std::string(to_string(space.space()));
  m.s_sampled = s_sampled(sample, space);
  m.intra_mean = intra_mean(assignments, space, mode);
  m.d_intra_inter = m.intra_mean - m.s_sampled;
  m.n_samples = sample.size();
  m.k = assignments.empty() ? 0 : *std::max_element(assignments.begin(), assignments.end()) + 1;
  return m;
}

nlohmann::ordered_json to_json(const SpaceMetrics& row) {
  nlohmann::ordered_json j;
  j["method"] = row.method_label;
  j["space"] = row.space;
  j["S_sampled"] = row.s_sampled;
  j["intra_mean"] = row.intra_mean;
  j["D_intra_inter"] = row.d_intra_inter;
  j["n_samples"] = row.n_samples;
  j["k"] = row.k;
  return j;
}

nlohmann::ordered_json to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) j["rows"].push_back(to_json(row));
  j["notes"] = report.notes;
  return j;
}

}  // namespace grasp
