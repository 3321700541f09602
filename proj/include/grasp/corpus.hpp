#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>
#include <nlohmann/json_fwd.hpp>

namespace grasp {

using PageId = std::uint32_t;

// Number of auto-check rules carried per page (violation counts per rule).
inline constexpr std::size_t kAutocheckRules = 131;

struct PageRecord {
  PageId page_id = 0;            // contiguous 0..n-1 after loading
  std::int64_t source_id = 0;    // page_id as written in the manifest
  std::string url;
  std::string dom_path;          // relative to the corpus root
  std::optional<std::string> screenshot_path;
  std::optional<std::vector<std::uint32_t>> autocheck;
};

struct DirectedEdge {
  PageId src = 0;
  PageId dst = 0;
  auto operator<=>(const DirectedEdge&) const = default;
};

// Directed hyperlink graph: sorted, duplicate-free, no self-loops.
class LinkGraph {
 public:
  LinkGraph() = default;

  // Sorts and deduplicates; self-loops are dropped. Throws ReferentialError
  // if an endpoint is >= n.
  static LinkGraph from_edges(std::size_t n, std::vector<DirectedEdge> edges);

  std::size_t size() const { return n_; }
  const std::vector<DirectedEdge>& edges() const { return edges_; }
  bool contains(PageId src, PageId dst) const;

 private:
  std::size_t n_ = 0;
  std::vector<DirectedEdge> edges_;
};

struct Corpus {
  std::vector<PageRecord> pages;
  LinkGraph graph;
  std::filesystem::path root;

  std::size_t size() const { return pages.size(); }
  std::filesystem::path dom_file(PageId id) const;
  std::optional<std::filesystem::path> screenshot_file(PageId id) const;
  // Maps a manifest page_id to the loaded index.
  std::optional<PageId> index_of_source(std::int64_t source_id) const;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr const char* kManifestFile = "manifest.jsonl";
inline constexpr const char* kEdgesFile = "edges.tsv";

// Reads a JSON-Lines manifest and a TSV edge list (ids as in the manifest).
Corpus load_corpus(const std::filesystem::path& manifest_path,
                   const std::filesystem::path& edges_path);
Corpus load_corpus_dir(const std::filesystem::path& dir);

// Writes manifest.jsonl and edges.tsv under dir using loaded (contiguous) ids.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

std::string read_dom(const Corpus& corpus, PageId id);

// Binary n x n adjacency. With symmetrize, A(i,j) = A(j,i) = 1 whenever
// either direction exists.
SparseMatrix build_adjacency(const LinkGraph& graph, bool symmetrize = true);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

ValidationReport validate_corpus(const Corpus& corpus);
nlohmann::ordered_json to_json(const ValidationReport& report);

}  // namespace grasp
