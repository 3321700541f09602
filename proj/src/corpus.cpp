#include "grasp/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "grasp/error.hpp"

namespace grasp {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<std::int64_t> parse_id(std::string_view s) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || v < 0) return std::nullopt;
  return v;
}

PageRecord parse_page(const json& obj, const std::string& file, std::size_t line) {
  if (!obj.is_object()) throw ParseError(file, line, "expected a JSON object");
  PageRecord page;
  const auto& id = obj.at("page_id");
  if (!id.is_number_integer() || id.get<std::int64_t>() < 0) {
    throw SchemaError(file + ":" + std::to_string(line) +
                      ": page_id must be a non-negative integer");
  }
  page.source_id = id.get<std::int64_t>();
  page.url = obj.at("url").get<std::string>();
  page.dom_path = obj.at("dom_path").get<std::string>();
  if (const auto it = obj.find("screenshot_path"); it != obj.end() && !it->is_null()) {
    page.screenshot_path = it->get<std::string>();
  }
  if (const auto it = obj.find("autocheck"); it != obj.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != kAutocheckRules) {
      throw SchemaError(file + ":" + std::to_string(line) + ": autocheck must hold exactly " +
                        std::to_string(kAutocheckRules) + " counts, got " +
                        std::to_string(it->is_array() ? it->size() : 0));
    }
    std::vector<std::uint32_t> counts;
    counts.reserve(kAutocheckRules);
    for (const auto& v : *it) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw SchemaError(file + ":" + std::to_string(line) +
                          ": autocheck counts must be non-negative integers");
      }
      counts.push_back(v.get<std::uint32_t>());
    }
    page.autocheck = std::move(counts);
  }
  return page;
}

}  // namespace

LinkGraph LinkGraph::from_edges(std::size_t n, std::vector<DirectedEdge> edges) {
  for (const auto& e : edges) {
    if (e.src >= n || e.dst >= n) {
      throw ReferentialError("edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                             ") references a page outside 0.." + std::to_string(n));
    }
  }
  std::erase_if(edges, [](const DirectedEdge& e) { return e.src == e.dst; });
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  LinkGraph g;
  g.n_ = n;
  g.edges_ = std::move(edges);
  return g;
}

bool LinkGraph::contains(PageId src, PageId dst) const {
  return std::binary_search(edges_.begin(), edges_.end(), DirectedEdge{src, dst});
}

fs::path Corpus::dom_file(PageId id) const { return root / pages.at(id).dom_path; }

std::optional<fs::path> Corpus::screenshot_file(PageId id) const {
  const auto& p = pages.at(id).screenshot_path;
  if (!p) return std::nullopt;
  return root / *p;
}

std::optional<PageId> Corpus::index_of_source(std::int64_t source_id) const {
  for (const auto& p : pages) {
    if (p.source_id == source_id) return p.page_id;
  }
  return std::nullopt;
}

Corpus load_corpus(const fs::path& manifest_path, const fs::path& edges_path) {
  std::ifstream manifest(manifest_path);
  if (!manifest) throw IoError("cannot open manifest " + manifest_path.string());

  Corpus corpus;
  corpus.root = manifest_path.parent_path();
  std::unordered_map<std::int64_t, PageId> index;
  const std::string mfile = manifest_path.string();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(manifest, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(mfile, lineno, e.what());
    }
    PageRecord page;
    try {
      page = parse_page(obj, mfile, lineno);
    } catch (const json::exception& e) {
      throw ParseError(mfile, lineno, e.what());
    }
    page.page_id = static_cast<PageId>(corpus.pages.size());
    if (!index.emplace(page.source_id, page.page_id).second) {
      throw SchemaError(mfile + ":" + std::to_string(lineno) + ": duplicate page_id " +
                        std::to_string(page.source_id));
    }
    corpus.pages.push_back(std::move(page));
  }

  std::ifstream edges_in(edges_path);
  if (!edges_in) throw IoError("cannot open edge list " + edges_path.string());
  const std::string efile = edges_path.string();
  std::vector<DirectedEdge> edges;
  lineno = 0;
  while (std::getline(edges_in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(efile, lineno, "expected \"src<TAB>dst\"");
    const auto src = parse_id(std::string_view(line).substr(0, tab));
    const auto dst = parse_id(std::string_view(line).substr(tab + 1));
    if (!src || !dst) throw ParseError(efile, lineno, "ids must be non-negative integers");
    for (const auto id : {*src, *dst}) {
      if (!index.contains(id)) {
        throw ReferentialError(efile + ":" + std::to_string(lineno) + ": page id " +
                               std::to_string(id) + " is not in the manifest");
      }
    }
    edges.push_back({index.at(*src), index.at(*dst)});
  }
  corpus.graph = LinkGraph::from_edges(corpus.pages.size(), std::move(edges));
  return corpus;
}

Corpus load_corpus_dir(const fs::path& dir) {
  return load_corpus(dir / kManifestFile, dir / kEdgesFile);
}

void write_corpus(const Corpus& corpus, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream manifest(dir / kManifestFile, std::ios::binary);
  if (!manifest) throw IoError("cannot write " + (dir / kManifestFile).string());
  for (const auto& p : corpus.pages) {
    nlohmann::ordered_json obj;
    obj["page_id"] = p.page_id;
    obj["url"] = p.url;
    obj["dom_path"] = p.dom_path;
    obj["screenshot_path"] = p.screenshot_path ? nlohmann::ordered_json(*p.screenshot_path)
                                               : nlohmann::ordered_json(nullptr);
    obj["autocheck"] =
        p.autocheck ? nlohmann::ordered_json(*p.autocheck) : nlohmann::ordered_json(nullptr);
    manifest << obj.dump() << '\n';
  }
  std::ofstream edges(dir / kEdgesFile, std::ios::binary);
  if (!edges) throw IoError("cannot write " + (dir / kEdgesFile).string());
  for (const auto& e : corpus.graph.edges()) edges << e.src << '\t' << e.dst << '\n';
}

std::string read_dom(const Corpus& corpus, PageId id) {
  const auto path = corpus.dom_file(id);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("page " + std::to_string(id) + " (" + corpus.pages.at(id).url +
                  "): cannot read DOM file " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SparseMatrix build_adjacency(const LinkGraph& graph, bool symmetrize) {
  const auto n = static_cast<Eigen::Index>(graph.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(graph.edges().size() * (symmetrize ? 2 : 1));
  for (const auto& e : graph.edges()) {
    triplets.emplace_back(e.src, e.dst, 1.0);
    if (symmetrize) triplets.emplace_back(e.dst, e.src, 1.0);
  }
  SparseMatrix a(n, n);
  // Duplicates (both directions present) collapse to 1 instead of summing.
  a.setFromTriplets(triplets.begin(), triplets.end(), [](double, double) { return 1.0; });
  return a;
}

ValidationReport validate_corpus(const Corpus& corpus) {
  ValidationReport report;
  std::vector<int> degree(corpus.size(), 0);
  for (const auto& e : corpus.graph.edges()) {
    ++degree[e.src];
    ++degree[e.dst];
  }
  std::map<std::string, PageId> seen_urls;
  for (const auto& page : corpus.pages) {
    const auto id = std::to_string(page.page_id);
    if (!fs::is_regular_file(corpus.dom_file(page.page_id))) {
      report.errors.push_back("page " + id + ": missing DOM file " + page.dom_path);
    }
    if (const auto shot = corpus.screenshot_file(page.page_id);
        shot && !fs::is_regular_file(*shot)) {
      report.warnings.push_back("page " + id + ": missing screenshot " + *page.screenshot_path);
    }
    if (corpus.size() > 1 && degree[page.page_id] == 0) {
      report.warnings.push_back("page " + id + ": isolated node (no links in or out)");
    }
    const auto [it, inserted] = seen_urls.emplace(page.url, page.page_id);
    if (!inserted) {
      report.warnings.push_back("page " + id + ": duplicate URL " + page.url + " (first seen on page " +
                                std::to_string(it->second) + ")");
    }
  }
  report.ok = report.errors.empty();
  return report;
}

nlohmann::ordered_json to_json(const ValidationReport& report) {
  nlohmann::ordered_json j;
  j["ok"] = report.ok;
  j["errors"] = report.errors;
  j["warnings"] = report.warnings;
  return j;
}

}  // namespace grasp
