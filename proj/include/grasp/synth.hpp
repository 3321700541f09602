#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "grasp/corpus.hpp"
#include "grasp/embeddings.hpp"
#include "grasp/sampling.hpp"

namespace grasp {

// Synthetic website with planted page types.
struct SynthSpec {
  int k_types = 20;
  int pages_per_type = 10;
  // Ratio of between-type to within-type feature distance; per-page noise
  // shrinks as this grows.
  double separation = 2.0;
  // Probability that a random (non-tree) link stays within its page type.
  double homophily = 0.8;
  int noise_edges = 20;  // extra uniform cross-type links
  std::uint64_t seed = 0;

  void validate() const;  // throws ContractError
};

inline constexpr int kSynthVisualDim = 256;

struct SynthSite {
  std::vector<std::string> urls;
  std::vector<std::string> doms;
  std::vector<std::vector<std::string>> layout_tokens;  // visual channel input
  std::vector<int> labels;                              // planted type per page
  std::vector<DirectedEdge> edges;
  std::vector<DirectedEdge> noise_edges;  // the planted cross-type noise links
};

SynthSite generate_site(const SynthSpec& spec);

// Hash embedding of the layout channel (the synthetic stand-in for screenshots).
EmbeddingMatrix synth_visual_embedding(const SynthSite& site, std::uint64_t seed);

struct SynthCorpus {
  Corpus corpus;
  std::vector<int> truth;
  SynthSite site;
};

// Writes manifest.jsonl, edges.tsv, dom/<id>.html, visual.ids.txt + visual.f32,
// truth.json and synth_spec.json under out_dir.
SynthCorpus generate_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir);

std::vector<int> load_truth(const std::filesystem::path& truth_path);

// Distinct planted types among collective sample entries, divided by k_types.
double recovery_score(const SampleSet& sample, const std::vector<int>& truth);
double recovery_score(const std::vector<PageId>& collective, const std::vector<int>& truth);

}  // namespace grasp
