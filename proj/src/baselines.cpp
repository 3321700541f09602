#include "grasp/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include <Eigen/SVD>

#include "grasp/error.hpp"
#include "grasp/html.hpp"

namespace grasp {
namespace {

using CountMap = std::map<std::string, int>;

// Keys ordered by descending total count, ties broken lexicographically.
std::vector<std::string> top_keys(const std::vector<const CountMap*>& maps, std::size_t limit) {
  std::map<std::string, long long> totals;
  for (const auto* m : maps) {
    for (const auto& [key, count] : *m) totals[key] += count;
  }
  std::vector<std::pair<std::string, long long>> ranked(totals.begin(), totals.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > limit) ranked.resize(limit);
  std::vector<std::string> keys;
  keys.reserve(ranked.size());
  for (auto& [key, count] : ranked) keys.push_back(std::move(key));
  return keys;
}

FeatureTable count_table(const std::vector<const CountMap*>& maps,
                         std::vector<std::string> columns, std::string_view prefix) {
  FeatureTable t;
  t.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(maps.size()),
                                   static_cast<Eigen::Index>(columns.size()));
  std::unordered_map<std::string, Eigen::Index> col;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    col.emplace(columns[j], static_cast<Eigen::Index>(j));
  }
  for (std::size_t i = 0; i < maps.size(); ++i) {
    for (const auto& [key, count] : *maps[i]) {
      if (const auto it = col.find(key); it != col.end()) {
        t.values(static_cast<Eigen::Index>(i), it->second) = count;
      }
    }
  }
  for (auto& c : columns) c = std::string(prefix) + c;
  t.columns = std::move(columns);
  return t;
}

void normalize_rows(Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double n = m.row(i).norm();
    if (n > 0.0) m.row(i) /= n;
  }
}

}  // namespace

std::string_view to_string(SdcKind kind) {
  switch (kind) {
    case SdcKind::kContent:
      return "content";
    case SdcKind::kStructure:
      return "structure";
    case SdcKind::kStrucCont:
      return "struc_cont";
    case SdcKind::kTags:
      return "tags";
    case SdcKind::kTree:
      return "tree";
  }
  return "unknown";
}

std::optional<SdcKind> parse_sdc_kind(std::string_view name) {
  for (const auto k : {SdcKind::kContent, SdcKind::kStructure, SdcKind::kStrucCont, SdcKind::kTags,
                       SdcKind::kTree}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

DomStatistics dom_statistics(std::string_view dom) {
  const auto tokens = html::tokenize(dom);
  const auto elements = html::build_tree(tokens);
  DomStatistics s;
  s.node_count = static_cast<int>(elements.size());
  for (const auto& e : elements) {
    ++s.tag_counts[e.tag];
    s.max_depth = std::max(s.max_depth, e.depth);
    ++s.branching[static_cast<std::size_t>(
        std::min<int>(e.child_count, static_cast<int>(kBranchingBuckets) - 1))];
    if (e.parent >= 0) {
      ++s.tag_bigrams[elements[static_cast<std::size_t>(e.parent)].tag + ">" + e.tag];
    }
  }
  for (auto w : html::text_words(tokens)) {
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    ++s.word_counts[w];
  }
  return s;
}

FeatureTable sdc_feature_table(const std::vector<DomStatistics>& pages, SdcKind kind) {
  std::vector<const CountMap*> maps;
  maps.reserve(pages.size());
  switch (kind) {
    case SdcKind::kContent: {
      for (const auto& p : pages) maps.push_back(&p.word_counts);
      return count_table(maps, top_keys(maps, kContentVocabulary), "word:");
    }
    case SdcKind::kStructure: {
      for (const auto& p : pages) maps.push_back(&p.tag_bigrams);
      return count_table(maps, top_keys(maps, kStructureVocabulary), "bigram:");
    }
    case SdcKind::kTags: {
      for (const auto& p : pages) maps.push_back(&p.tag_counts);
      std::vector<std::string> columns;
      for (const auto& [tag, _] : [&] {
             std::map<std::string, int> all;
             for (const auto* m : maps) all.insert(m->begin(), m->end());
             return all;
           }()) {
        columns.push_back(tag);
      }
      return count_table(maps, std::move(columns), "tag:");
    }
    case SdcKind::kTree: {
      FeatureTable t;
      t.columns = {"max_depth", "node_count"};
      for (std::size_t b = 0; b < kBranchingBuckets; ++b) {
        t.columns.push_back("branching:" + std::to_string(b) +
                            (b + 1 == kBranchingBuckets ? "+" : ""));
      }
      t.values.resize(static_cast<Eigen::Index>(pages.size()), 2 + kBranchingBuckets);
      for (std::size_t i = 0; i < pages.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        t.values(r, 0) = pages[i].max_depth;
        t.values(r, 1) = pages[i].node_count;
        for (std::size_t b = 0; b < kBranchingBuckets; ++b) {
          t.values(r, static_cast<Eigen::Index>(2 + b)) = pages[i].branching[b];
        }
      }
      return t;
    }
    case SdcKind::kStrucCont: {
      auto structure = sdc_feature_table(pages, SdcKind::kStructure);
      auto content = sdc_feature_table(pages, SdcKind::kContent);
      normalize_rows(structure.values);
      normalize_rows(content.values);
      FeatureTable t;
      t.columns = structure.columns;
      t.columns.insert(t.columns.end(), content.columns.begin(), content.columns.end());
      t.values.resize(static_cast<Eigen::Index>(pages.size()),
                      structure.values.cols() + content.values.cols());
      t.values << structure.values, content.values;
      return t;
    }
  }
  throw ContractError("unknown SDC feature kind");
}

EmbeddingMatrix sdc_features(const Corpus& corpus, SdcKind kind) {
  std::vector<DomStatistics> stats;
  std::vector<PageId> ids;
  stats.reserve(corpus.size());
  for (const auto& page : corpus.pages) {
    stats.push_back(dom_statistics(read_dom(corpus, page.page_id)));
    ids.push_back(page.page_id);
  }
  auto table = sdc_feature_table(stats, kind);
  if (table.values.cols() == 0) {
    // No vocabulary at all (e.g. pages without text): keep one zero column.
    table.values = Eigen::MatrixXd::Zero(table.values.rows(), 1);
  }
  normalize_rows(table.values);
  // Statistical DOM features live in no encoder space; tagged as text-derived.
  return EmbeddingMatrix(std::move(ids), table.values.cast<float>(), Space::kText);
}

PcaResult pca(const EmbeddingMatrix& embedding, int target_dim) {
  const auto d = embedding.cols();
  if (target_dim < 1 || target_dim > d) {
    throw ContractError("PCA target dimension " + std::to_string(target_dim) +
                        " must lie in [1, " + std::to_string(d) + "]");
  }
  const Eigen::MatrixXd x = embedding.to_double();
  PcaResult r;
  r.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - r.mean;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::MatrixXd& v = svd.matrixV();
  const Eigen::VectorXd& sv = svd.singularValues();
  const double total = sv.squaredNorm();

  r.components = Eigen::MatrixXd::Zero(d, target_dim);
  r.explained_variance_ratio = Eigen::VectorXd::Zero(target_dim);
  const auto available = std::min<Eigen::Index>(target_dim, v.cols());
  for (Eigen::Index c = 0; c < available; ++c) {
    Eigen::VectorXd comp = v.col(c);
    Eigen::Index arg = 0;
    comp.cwiseAbs().maxCoeff(&arg);
    if (comp(arg) < 0.0) comp = -comp;
    r.components.col(c) = comp;
    r.explained_variance_ratio(c) = total > 0.0 ? sv(c) * sv(c) / total : 0.0;
  }
  const Eigen::MatrixXd projected = centered * r.components;
  r.projected = EmbeddingMatrix(embedding.ids(), projected.cast<float>(), embedding.space());
  return r;
}

EmbeddingMatrix pca_reduce(const EmbeddingMatrix& embedding, int target_dim) {
  return pca(embedding, target_dim).projected;
}

}  // namespace grasp
