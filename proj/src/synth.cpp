#include "grasp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "grasp/error.hpp"

namespace grasp {
namespace fs = std::filesystem;

namespace {

constexpr int kTemplateWords = 24;
constexpr int kTemplateBlocks = 6;
constexpr int kNoiseWordsAtUnitSeparation = 48;
constexpr int kNoisePool = 5000;
constexpr int kLayoutTokens = 16;
constexpr int kLayoutNoiseAtUnitSeparation = 24;
constexpr int kLayoutNoisePool = 5000;
constexpr int kMaxNoiseTokens = 480;

constexpr const char* kBlockTags[] = {"section", "article", "aside",  "table",      "form",
                                      "ul",      "ol",      "figure", "dl",         "pre",
                                      "nav",     "header",  "footer", "blockquote", "details",
                                      "video",   "canvas",  "address"};

int noise_count(int at_unit, double separation) {
  if (separation <= 0.0) return kMaxNoiseTokens;
  return std::min(kMaxNoiseTokens, static_cast<int>(std::lround(at_unit / separation)));
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

void SynthSpec::validate() const {
  if (k_types < 2) throw ContractError("synthetic corpus needs k_types >= 2");
  if (pages_per_type < 2) throw ContractError("synthetic corpus needs pages_per_type >= 2");
  if (separation < 0.0) throw ContractError("separation must be >= 0");
  if (homophily < 0.0 || homophily > 1.0) throw ContractError("homophily must lie in [0, 1]");
  if (noise_edges < 0) throw ContractError("noise_edges must be >= 0");
}

SynthSite generate_site(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const auto k = static_cast<std::size_t>(spec.k_types);
  const auto n = k * static_cast<std::size_t>(spec.pages_per_type);

  SynthSite site;
  site.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) site.labels[i] = static_cast<int>(i % k);
  std::shuffle(site.labels.begin(), site.labels.end(), rng);

  std::vector<std::vector<PageId>> by_type(k);
  for (std::size_t i = 0; i < n; ++i) {
    by_type[static_cast<std::size_t>(site.labels[i])].push_back(static_cast<PageId>(i));
  }

  // Type templates: custom-element blocks (t3-section, ...) plus a private
  // vocabulary, so that both tag and token vocabularies are type-specific.
  constexpr std::size_t kTagPool = std::size(kBlockTags);
  std::vector<std::vector<std::string>> block_tags(k);
  for (std::size_t t = 0; t < k; ++t) {
    for (int b = 0; b < kTemplateBlocks; ++b) {
      block_tags[t].push_back("t" + std::to_string(t) + "-" + kBlockTags[uniform_index(rng, kTagPool)]);
    }
  }

  std::set<DirectedEdge> edges;
  // Spanning tree per type: each page links from a random earlier page.
  for (const auto& members : by_type) {
    for (std::size_t j = 1; j < members.size(); ++j) {
      edges.insert({members[uniform_index(rng, j)], members[j]});
    }
  }
  // One random link per page, intra-type with probability `homophily`.
  std::bernoulli_distribution stay(spec.homophily);
  for (std::size_t u = 0; u < n; ++u) {
    const auto type = static_cast<std::size_t>(site.labels[u]);
    const bool intra = stay(rng);
    PageId v = static_cast<PageId>(u);
    if (intra) {
      const auto& members = by_type[type];
      while (v == u) v = members[uniform_index(rng, members.size())];
    } else {
      while (static_cast<std::size_t>(site.labels[v]) == type) v = static_cast<PageId>(uniform_index(rng, n));
    }
    edges.insert({static_cast<PageId>(u), v});
  }
  for (int e = 0; e < spec.noise_edges; ++e) {
    PageId u = static_cast<PageId>(uniform_index(rng, n));
    PageId v = u;
    while (site.labels[v] == site.labels[u]) v = static_cast<PageId>(uniform_index(rng, n));
    edges.insert({u, v});
    site.noise_edges.push_back({u, v});
  }
  site.edges.assign(edges.begin(), edges.end());

  const int noise_words = noise_count(kNoiseWordsAtUnitSeparation, spec.separation);
  const int layout_noise = noise_count(kLayoutNoiseAtUnitSeparation, spec.separation);
  site.urls.resize(n);
  site.doms.resize(n);
  site.layout_tokens.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto type = static_cast<std::size_t>(site.labels[i]);
    const std::string tname = "t" + std::to_string(type);
    site.urls[i] = "https://synth.test/p" + std::to_string(i) + ".html";

    std::string dom = "<!DOCTYPE html>\n<html><head><title>" + tname + " page</title></head><body>\n";
    const int per_block = kTemplateWords / kTemplateBlocks;
    for (int b = 0; b < kTemplateBlocks; ++b) {
      const auto& tag = block_tags[type][static_cast<std::size_t>(b)];
      dom += "<" + tag + ">";
      for (int w = 0; w < per_block; ++w) {
        dom += " " + tname + "w" + std::to_string(b * per_block + w);
      }
      dom += " </" + tag + ">\n";
    }
    dom += "<div class=\"noise\">";
    for (int w = 0; w < noise_words; ++w) {
      dom += " common" + std::to_string(uniform_index(rng, kNoisePool));
    }
    // No anchor markup: the link graph lives in edges.tsv only. Anchors would
    // make the text channel encode node degree.
    dom += " </div>\n</body></html>\n";
    site.doms[i] = std::move(dom);

    auto& layout = site.layout_tokens[i];
    for (int j = 0; j < kLayoutTokens; ++j) layout.push_back("layout:" + tname + ":" + std::to_string(j));
    for (int j = 0; j < layout_noise; ++j) {
      layout.push_back("layout:common:" + std::to_string(uniform_index(rng, kLayoutNoisePool)));
    }
  }
  return site;
}

EmbeddingMatrix synth_visual_embedding(const SynthSite& site, std::uint64_t seed) {
  std::vector<PageId> ids(site.layout_tokens.size());
  std::iota(ids.begin(), ids.end(), PageId{0});
  // Distinct key from the text channel so the two hash spaces are unrelated.
  return hash_embed_tokens(site.layout_tokens, ids, kSynthVisualDim, seed ^ 0x5EEDF00DULL,
                           Space::kVisual);
}

SynthCorpus generate_corpus(const SynthSpec& spec, const fs::path& out_dir) {
  SynthCorpus out;
  out.site = generate_site(spec);
  out.truth = out.site.labels;
  const auto n = out.site.doms.size();

  fs::create_directories(out_dir / "dom");
  Corpus& corpus = out.corpus;
  corpus.root = out_dir;
  for (std::size_t i = 0; i < n; ++i) {
    PageRecord page;
    page.page_id = static_cast<PageId>(i);
    page.source_id = static_cast<std::int64_t>(i);
    page.url = out.site.urls[i];
    page.dom_path = "dom/" + std::to_string(i) + ".html";
    std::ofstream dom(out_dir / page.dom_path, std::ios::binary);
    if (!dom) throw IoError("cannot write " + (out_dir / page.dom_path).string());
    dom << out.site.doms[i];
    corpus.pages.push_back(std::move(page));
  }
  corpus.graph = LinkGraph::from_edges(n, out.site.edges);
  write_corpus(corpus, out_dir);

  const auto visual = synth_visual_embedding(out.site, spec.seed);
  store_embedding_files(visual, exchange_ids_path(out_dir, Space::kVisual),
                        exchange_matrix_path(out_dir, Space::kVisual));

  nlohmann::ordered_json truth = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < n; ++i) truth[std::to_string(i)] = out.truth[i];
  std::ofstream(out_dir / "truth.json", std::ios::binary) << truth.dump(2) << '\n';

  nlohmann::ordered_json echo;
  echo["k_types"] = spec.k_types;
  echo["pages_per_type"] = spec.pages_per_type;
  echo["separation"] = spec.separation;
  echo["homophily"] = spec.homophily;
  echo["noise_edges"] = spec.noise_edges;
  echo["seed"] = spec.seed;
  echo["visual_dim"] = kSynthVisualDim;
  std::ofstream(out_dir / "synth_spec.json", std::ios::binary) << echo.dump(2) << '\n';
  return out;
}

std::vector<int> load_truth(const fs::path& truth_path) {
  std::ifstream in(truth_path);
  if (!in) throw IoError("cannot open " + truth_path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(truth_path.string(), 1, e.what());
  }
  std::vector<int> labels(j.size(), -1);
  for (const auto& [key, value] : j.items()) {
    const auto id = std::stoul(key);
    if (id >= labels.size()) throw SchemaError("truth ids must be contiguous from 0");
    labels[id] = value.get<int>();
  }
  return labels;
}

double recovery_score(const std::vector<PageId>& collective, const std::vector<int>& truth) {
  const std::set<int> types(truth.begin(), truth.end());
  if (types.empty()) return 0.0;
  std::set<int> found;
  for (const auto id : collective) {
    if (id >= truth.size()) {
      throw ReferentialError("sampled page " + std::to_string(id) + " has no truth label");
    }
    found.insert(truth[id]);
  }
  return static_cast<double>(found.size()) / static_cast<double>(types.size());
}

double recovery_score(const SampleSet& sample, const std::vector<int>& truth) {
  return recovery_score(sample.pages(Provenance::kCollective), truth);
}

}  // namespace grasp
