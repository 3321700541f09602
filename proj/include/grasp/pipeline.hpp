#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "grasp/baselines.hpp"
#include "grasp/clustering.hpp"
#include "grasp/corpus.hpp"
#include "grasp/embeddings.hpp"
#include "grasp/graph.hpp"
#include "grasp/metrics.hpp"
#include "grasp/sampling.hpp"
#include "grasp/structure_learning.hpp"

namespace grasp {

inline constexpr const char* kToolName = "grasp";
inline constexpr const char* kToolVersion = "0.1.0";

enum class EmbeddingSource { kFiles, kHash };

std::string_view to_string(EmbeddingSource source);
std::optional<EmbeddingSource> parse_embedding_source(std::string_view name);

struct PipelineConfig {
  std::filesystem::path corpus_dir;
  EmbeddingSource source = EmbeddingSource::kHash;
  std::filesystem::path embeddings_dir;  // defaults to corpus_dir
  int hash_dim = 256;
  std::optional<int> text_dim;    // inferred from file size when unset
  std::optional<int> visual_dim;  // likewise; also the zero-block width
  std::uint64_t seed = 0;
  RefinementParams refinement;
  PropagationParams propagation;
  std::optional<std::filesystem::path> structured_path;
  std::optional<std::filesystem::path> processes_path;
  RandomBase random_base = RandomBase::kStructured;
  IntraMode intra_mode = IntraMode::kPerCluster;
  std::vector<Space> metric_spaces = {Space::kText, Space::kVisual};
  std::filesystem::path report_path = "report.json";
  std::filesystem::path metrics_path = "metrics.json";

  std::filesystem::path effective_embeddings_dir() const;
};

nlohmann::ordered_json to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const nlohmann::json& params);

// Everything loaded for one website.
struct SiteInputs {
  Corpus corpus;
  EmbeddingMatrix text;
  std::optional<EmbeddingMatrix> visual;  // nullopt when no visual embeddings exist
  std::vector<PageId> structured;
  std::vector<PageId> processes;
  std::vector<std::string> warnings;

  // Visual rows, or a zero block of `dim` columns when absent.
  EmbeddingMatrix visual_or_zero(int dim) const;
  // Metric space by tag; nullopt when not available for this site.
  std::optional<EmbeddingMatrix> space(Space which, const EmbeddingMatrix* fused,
                                       const EmbeddingMatrix* graph) const;
};

SiteInputs load_site_inputs(const PipelineConfig& config);

struct SiteRun {
  EmbeddingMatrix fused;
  GraspResult grasp;
  std::vector<Representative> representatives;
  SampleSet sample;

  std::vector<PageId> collective() const;
};

SiteRun run_grasp(const SiteInputs& inputs, const PipelineConfig& config);

nlohmann::ordered_json build_report(const SiteInputs& inputs, const SiteRun& run,
                                    const PipelineConfig& config);
MetricsReport grasp_metrics(const SiteInputs& inputs, const SiteRun& run,
                            const PipelineConfig& config);

struct PipelineOutcome {
  nlohmann::ordered_json report;
  nlohmann::ordered_json metrics;
  std::vector<std::string> warnings;
};

// load -> fuse -> iterate -> select -> assemble -> metrics, then writes
// report.json, metrics.json and a timestamped <report>.meta.json. Outputs are
// only written once everything has been computed; on failure no output file
// is left behind.
PipelineOutcome run_pipeline(const PipelineConfig& config);

struct BatchResult {
  std::filesystem::path corpus_dir;
  bool ok = false;
  bool input_error = false;
  std::string message;
};

// Runs independent sites on up to `parallel` worker threads.
std::vector<BatchResult> run_batch(const std::vector<PipelineConfig>& configs, int parallel);

// A sampler's output to score: the sampled pages and the clustering used for
// the intra-cluster term (indexed by page id).
struct MethodSample {
  std::string label;
  std::vector<PageId> sample;
  std::vector<int> assignments;
};

MethodSample random_method(std::size_t n_pages, std::size_t size, std::uint64_t seed,
                           std::vector<int> reference_assignments);
MethodSample sdc_method(const Corpus& corpus, SdcKind kind, std::optional<int> pca_dim, int k,
                        std::uint64_t seed, const KMeansOptions& kmeans_options = {});

struct EvalConfig {
  std::vector<std::filesystem::path> reports;
  std::vector<Space> spaces = {Space::kText, Space::kVisual};
  std::vector<std::string> methods = {"grasp", "random"};
  int pca_dim = 2;
  std::optional<std::uint64_t> seed;  // defaults to the report's seed
  std::optional<IntraMode> intra_mode;
  std::filesystem::path out = "metrics.json";
};

// Scores each method on each report's site; also emits per-method means
// across sites (uniform per-site averaging).
nlohmann::ordered_json run_eval(const EvalConfig& config);

}  // namespace grasp
