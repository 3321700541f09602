#include "grasp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "grasp/error.hpp"

namespace grasp {
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// Decorrelates the 3.b random draw and the random baseline from the k-means
// stream while staying a pure function of the configured seed.
constexpr std::uint64_t kRandomSampleStream = 0xA5A5'0000'0000'0001ULL;
constexpr std::uint64_t kRandomBaselineStream = 0xA5A5'0000'0000'0002ULL;

std::vector<PageId> load_page_list(const fs::path& path, const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open page list " + path.string());
  std::vector<PageId> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::int64_t id = -1;
    try {
      std::size_t used = 0;
      id = std::stoll(line, &used);
      if (line.find_first_not_of(" \t", used) != std::string::npos) id = -1;
    } catch (const std::exception&) {
      id = -1;
    }
    if (id < 0) throw ParseError(path.string(), lineno, "expected a page id");
    const auto idx = corpus.index_of_source(id);
    if (!idx) {
      throw ReferentialError(path.string() + ":" + std::to_string(lineno) + ": page id " +
                             std::to_string(id) + " is not in the corpus");
    }
    out.push_back(*idx);
  }
  return out;
}

int infer_dim(const fs::path& ids_path, const fs::path& matrix_path) {
  std::ifstream in(ids_path);
  if (!in) throw IoError("cannot open ids file " + ids_path.string());
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line != "\r") ++rows;
  }
  if (!fs::exists(matrix_path)) throw IoError("missing matrix file " + matrix_path.string());
  const auto bytes = fs::file_size(matrix_path);
  if (rows == 0 || bytes == 0 || bytes % (4 * rows) != 0) {
    throw SizeMismatchError(matrix_path.string() + ": cannot infer the dimension of " +
                            std::to_string(bytes) + " bytes over " + std::to_string(rows) +
                            " ids");
  }
  return static_cast<int>(bytes / (4 * rows));
}

EmbeddingMatrix load_space(const fs::path& dir, Space space, std::optional<int> dim,
                           const Corpus& corpus) {
  const auto ids = exchange_ids_path(dir, space);
  const auto mat = exchange_matrix_path(dir, space);
  const int d = dim ? *dim : infer_dim(ids, mat);
  return align_to_corpus(load_embedding_files(ids, mat, d, space), corpus);
}

template <typename Enum, typename Parse>
Enum parse_or_throw(const nlohmann::json& j, const char* key, Parse parse) {
  const auto name = j.at(key).get<std::string>();
  const auto v = parse(name);
  if (!v) throw SchemaError(std::string("unknown value for ") + key + ": " + name);
  return *v;
}

template <typename T>
std::optional<T> optional_field(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

ojson nullable(const std::optional<fs::path>& p) {
  return p ? ojson(p->string()) : ojson(nullptr);
}

ojson nullable(const std::optional<int>& v) { return v ? ojson(*v) : ojson(nullptr); }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

fs::path meta_path_for(const fs::path& report) {
  auto p = report;
  p.replace_extension(".meta.json");
  return p;
}

std::string space_list(const std::vector<Space>& spaces) {
  std::string out;
  for (const auto s : spaces) {
    if (!out.empty()) out += ",";
    out += to_string(s);
  }
  return out;
}

}  // namespace

std::string_view to_string(EmbeddingSource source) {
  return source == EmbeddingSource::kFiles ? "files" : "hash";
}

std::optional<EmbeddingSource> parse_embedding_source(std::string_view name) {
  if (name == "files") return EmbeddingSource::kFiles;
  if (name == "hash") return EmbeddingSource::kHash;
  return std::nullopt;
}

fs::path PipelineConfig::effective_embeddings_dir() const {
  return embeddings_dir.empty() ? corpus_dir : embeddings_dir;
}

ojson to_json(const PipelineConfig& c) {
  ojson j;
  j["corpus_dir"] = c.corpus_dir.string();
  j["embedding_source"] = to_string(c.source);
  j["embeddings_dir"] = c.effective_embeddings_dir().string();
  j["hash_dim"] = c.hash_dim;
  j["text_dim"] = nullable(c.text_dim);
  j["visual_dim"] = nullable(c.visual_dim);
  j["seed"] = c.seed;
  j["k"] = c.refinement.k;
  j["iterations"] = c.refinement.iterations;
  j["gamma"] = c.refinement.gamma;
  j["beta"] = c.refinement.beta;
  j["threshold_mode"] = to_string(c.refinement.threshold_mode);
  j["refine_mode"] = to_string(c.refinement.refine_mode);
  j["kmeans_max_iterations"] = c.refinement.kmeans.max_iterations;
  j["kmeans_restarts"] = c.refinement.kmeans.restarts;
  j["gnn"] = to_string(c.propagation.variant);
  j["layers"] = c.propagation.layers;
  j["adjacency_norm"] = to_string(c.propagation.norm);
  j["structured"] = nullable(c.structured_path);
  j["processes"] = nullable(c.processes_path);
  j["random_base"] = to_string(c.random_base);
  j["intra_mode"] = to_string(c.intra_mode);
  j["metric_spaces"] = ojson::array();
  for (const auto s : c.metric_spaces) j["metric_spaces"].push_back(to_string(s));
  return j;
}

PipelineConfig config_from_json(const nlohmann::json& j) {
  try {
    PipelineConfig c;
    c.corpus_dir = j.at("corpus_dir").get<std::string>();
    c.source = parse_or_throw<EmbeddingSource>(j, "embedding_source", parse_embedding_source);
    c.embeddings_dir = j.at("embeddings_dir").get<std::string>();
    c.hash_dim = j.at("hash_dim").get<int>();
    c.text_dim = optional_field<int>(j, "text_dim");
    c.visual_dim = optional_field<int>(j, "visual_dim");
    c.seed = j.at("seed").get<std::uint64_t>();
    c.refinement.k = j.at("k").get<int>();
    c.refinement.iterations = j.at("iterations").get<int>();
    c.refinement.gamma = j.at("gamma").get<double>();
    c.refinement.beta = j.at("beta").get<double>();
    c.refinement.threshold_mode =
        parse_or_throw<ThresholdMode>(j, "threshold_mode", parse_threshold_mode);
    c.refinement.refine_mode = parse_or_throw<RefineMode>(j, "refine_mode", parse_refine_mode);
    c.refinement.kmeans.max_iterations = j.at("kmeans_max_iterations").get<int>();
    c.refinement.kmeans.restarts = j.at("kmeans_restarts").get<int>();
    c.propagation.variant = parse_or_throw<GnnVariant>(j, "gnn", parse_gnn_variant);
    c.propagation.layers = j.at("layers").get<int>();
    c.propagation.norm = parse_or_throw<AdjacencyNorm>(j, "adjacency_norm", parse_adjacency_norm);
    if (const auto s = optional_field<std::string>(j, "structured")) c.structured_path = *s;
    if (const auto s = optional_field<std::string>(j, "processes")) c.processes_path = *s;
    c.random_base = parse_or_throw<RandomBase>(j, "random_base", parse_random_base);
    c.intra_mode = parse_or_throw<IntraMode>(j, "intra_mode", parse_intra_mode);
    c.metric_spaces.clear();
    for (const auto& s : j.at("metric_spaces")) {
      const auto space = parse_space(s.get<std::string>());
      if (!space) throw SchemaError("unknown metric space " + s.get<std::string>());
      c.metric_spaces.push_back(*space);
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed parameter echo: ") + e.what());
  }
}

EmbeddingMatrix SiteInputs::visual_or_zero(int dim) const {
  return visual ? *visual : zero_embedding(text.ids(), dim, Space::kVisual);
}

std::optional<EmbeddingMatrix> SiteInputs::space(Space which, const EmbeddingMatrix* fused,
                                                 const EmbeddingMatrix* graph) const {
  switch (which) {
    case Space::kText:
      return text;
    case Space::kVisual:
      return visual;
    case Space::kFused:
      return fused ? std::optional<EmbeddingMatrix>(*fused) : std::nullopt;
    case Space::kGraph:
      return graph ? std::optional<EmbeddingMatrix>(*graph) : std::nullopt;
  }
  return std::nullopt;
}

SiteInputs load_site_inputs(const PipelineConfig& config) {
  SiteInputs in;
  in.corpus = load_corpus_dir(config.corpus_dir);
  if (in.corpus.size() == 0) throw InputError("corpus " + config.corpus_dir.string() + " is empty");
  const auto dir = config.effective_embeddings_dir();
  if (config.source == EmbeddingSource::kHash) {
    in.text = hash_embed(in.corpus, config.hash_dim, config.seed);
  } else {
    in.text = load_space(dir, Space::kText, config.text_dim, in.corpus);
  }
  if (fs::exists(exchange_ids_path(dir, Space::kVisual)) &&
      fs::exists(exchange_matrix_path(dir, Space::kVisual))) {
    in.visual = load_space(dir, Space::kVisual, config.visual_dim, in.corpus);
  } else {
    in.warnings.push_back("no visual embeddings in " + dir.string() +
                          "; the visual block of the fused features is zero");
  }
  if (config.structured_path) in.structured = load_page_list(*config.structured_path, in.corpus);
  if (config.processes_path) in.processes = load_page_list(*config.processes_path, in.corpus);
  return in;
}

std::vector<PageId> SiteRun::collective() const { return sample.pages(Provenance::kCollective); }

SiteRun run_grasp(const SiteInputs& inputs, const PipelineConfig& config) {
  SiteRun run;
  run.fused = fuse_modalities(inputs.text, inputs.visual_or_zero(config.visual_dim.value_or(config.hash_dim)));
  RefinementParams refinement = config.refinement;
  refinement.seed = config.seed;
  if (refinement.k > static_cast<int>(inputs.corpus.size())) {
    throw InputError("k=" + std::to_string(refinement.k) + " exceeds the " +
                     std::to_string(inputs.corpus.size()) + " pages of the corpus");
  }
  run.grasp = grasp_iterate(inputs.corpus, run.fused, refinement, config.propagation);
  run.representatives = select_representatives(run.grasp.h_g, run.grasp.clustering);
  run.sample = assemble_sample(run.representatives, inputs.structured, inputs.processes,
                               inputs.corpus, config.seed ^ kRandomSampleStream,
                               config.random_base);
  return run;
}

ojson build_report(const SiteInputs& inputs, const SiteRun& run, const PipelineConfig& config) {
  const auto& corpus = inputs.corpus;
  ojson r;
  r["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  r["corpus"] = {{"pages", corpus.size()},
                 {"directed_edges", corpus.graph.edges().size()},
                 {"undirected_edges", undirected_edges(corpus.graph).size()}};
  r["params"] = to_json(config);
  r["params"]["random_sample"] = run.sample.params_echo;

  r["entries"] = ojson::array();
  for (const auto& e : run.sample.entries) {
    ojson entry;
    entry["page_id"] = corpus.pages[e.page_id].source_id;
    entry["url"] = corpus.pages[e.page_id].url;
    entry["provenance"] = to_string(e.provenance);
    entry["cluster_id"] = e.cluster_id ? ojson(*e.cluster_id) : ojson(nullptr);
    r["entries"].push_back(std::move(entry));
  }

  const Eigen::MatrixXd h = run.grasp.h_g.to_double();
  const auto& clustering = run.grasp.clustering;
  const auto members = clustering.members();
  r["clusters"] = ojson::array();
  for (const auto& rep : run.representatives) {
    const auto& m = members[static_cast<std::size_t>(rep.cluster)];
    double sum = 0.0;
    double max = 0.0;
    for (const auto row : m) {
      const double d = (h.row(row) - clustering.centroids.row(rep.cluster)).norm();
      sum += d;
      max = std::max(max, d);
    }
    ojson c;
    c["cluster_id"] = rep.cluster;
    c["size"] = m.size();
    c["representative"] = corpus.pages[rep.page_id].source_id;
    c["centroid_distance"] = {{"representative", rep.distance},
                              {"mean", sum / static_cast<double>(m.size())},
                              {"max", max}};
    r["clusters"].push_back(std::move(c));
  }
  r["assignments"] = clustering.assignments;
  r["inertia"] = clustering.inertia;

  r["refinement"] = ojson::array();
  for (std::size_t i = 0; i < run.grasp.history.size(); ++i) {
    const auto& s = run.grasp.history[i];
    r["refinement"].push_back({{"iteration", i + 1},
                               {"removal_threshold", s.removal_threshold},
                               {"recovery_threshold", s.recovery_threshold},
                               {"removed", s.removed.size()},
                               {"recovered", s.recovered.size()},
                               {"edges_after", s.edges_after}});
  }
  r["final_edges"] = run.grasp.final_edges.size();
  ojson warnings = inputs.warnings;
  for (const auto& w : run.grasp.warnings) warnings.push_back(w);
  r["warnings"] = warnings;
  return r;
}

MetricsReport grasp_metrics(const SiteInputs& inputs, const SiteRun& run,
                            const PipelineConfig& config) {
  MetricsReport report;
  const auto sample = run.collective();
  for (const auto which : config.metric_spaces) {
    const auto space = inputs.space(which, &run.fused, &run.grasp.h_g);
    if (!space) {
      report.notes.push_back(std::string(to_string(which)) +
                             " space skipped: no embeddings available");
      continue;
    }
    report.rows.push_back(
        evaluate_space("grasp", run.grasp.clustering.assignments, *space, sample, config.intra_mode));
  }
  return report;
}

PipelineOutcome run_pipeline(const PipelineConfig& config) {
  const auto started = std::chrono::system_clock::now();
  const auto inputs = load_site_inputs(config);
  const auto run = run_grasp(inputs, config);

  PipelineOutcome outcome;
  outcome.report = build_report(inputs, run, config);
  ojson metrics;
  metrics["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  metrics["params"] = to_json(config);
  const auto m = to_json(grasp_metrics(inputs, run, config));
  metrics["rows"] = m["rows"];
  metrics["notes"] = m["notes"];
  outcome.metrics = std::move(metrics);
  for (const auto& w : outcome.report["warnings"]) outcome.warnings.push_back(w.get<std::string>());

  const auto meta_path = meta_path_for(config.report_path);
  ojson meta;
  meta["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  meta["generated_at_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                     started.time_since_epoch())
                                     .count();
  meta["elapsed_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::system_clock::now() - started)
                           .count();
  try {
    write_text(config.report_path, outcome.report.dump(2) + "\n");
    write_text(config.metrics_path, outcome.metrics.dump(2) + "\n");
    write_text(meta_path, meta.dump(2) + "\n");
  } catch (...) {
    std::error_code ec;
    fs::remove(config.report_path, ec);
    fs::remove(config.metrics_path, ec);
    fs::remove(meta_path, ec);
    throw;
  }
  return outcome;
}

std::vector<BatchResult> run_batch(const std::vector<PipelineConfig>& configs, int parallel) {
  std::vector<BatchResult> results(configs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      auto& r = results[i];
      r.corpus_dir = configs[i].corpus_dir;
      try {
        run_pipeline(configs[i]);
        r.ok = true;
      } catch (const InputError& e) {
        r.input_error = true;
        r.message = e.what();
      } catch (const std::exception& e) {
        r.message = e.what();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, parallel));
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < std::min(threads, configs.size()); ++t) pool.emplace_back(worker);
  pool.clear();  // joins
  return results;
}

MethodSample random_method(std::size_t n_pages, std::size_t size, std::uint64_t seed,
                           std::vector<int> reference_assignments) {
  std::vector<PageId> pool(n_pages);
  for (std::size_t i = 0; i < n_pages; ++i) pool[i] = static_cast<PageId>(i);
  return {"random", random_sample(pool, size, seed), std::move(reference_assignments)};
}

MethodSample sdc_method(const Corpus& corpus, SdcKind kind, std::optional<int> pca_dim, int k,
                        std::uint64_t seed, const KMeansOptions& kmeans_options) {
  auto features = sdc_features(corpus, kind);
  std::string label = "sdc_" + std::string(to_string(kind));
  if (pca_dim) {
    features = pca_reduce(features, std::min<int>(*pca_dim, static_cast<int>(features.cols())));
    label += "+pca";
  }
  label += "@" + std::string(kSdcVersion);
  const auto clustering = kmeans(features, k, seed, kmeans_options);
  MethodSample m;
  m.label = std::move(label);
  for (const auto& rep : select_representatives(features, clustering)) m.sample.push_back(rep.page_id);
  m.assignments = clustering.assignments;
  return m;
}

ojson run_eval(const EvalConfig& config) {
  if (config.reports.empty()) throw InputError("eval needs at least one report");
  ojson out;
  out["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  out["spaces"] = space_list(config.spaces);
  out["sites"] = ojson::array();
  out["rows"] = ojson::array();
  ojson notes = ojson::array();
  bool pca_noted = false;

  struct Sum {
    double s = 0, intra = 0, d = 0;
    int sites = 0;
  };
  std::map<std::pair<std::string, std::string>, Sum> sums;
  std::vector<std::pair<std::string, std::string>> order;

  for (const auto& report_path : config.reports) {
    std::ifstream in(report_path);
    if (!in) throw IoError("cannot open report " + report_path.string());
    nlohmann::json report;
    try {
      report = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(report_path.string(), 1, e.what());
    }
    auto site_config = config_from_json(report.at("params"));
    if (config.intra_mode) site_config.intra_mode = *config.intra_mode;
    const auto inputs = load_site_inputs(site_config);
    const std::uint64_t seed = config.seed.value_or(site_config.seed);

    std::vector<int> assignments;
    try {
      assignments = report.at("assignments").get<std::vector<int>>();
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(report_path.string() + ": " + e.what());
    }
    if (assignments.size() != inputs.corpus.size()) {
      throw SchemaError(report_path.string() + ": assignments do not cover the corpus");
    }
    MethodSample grasp{"grasp", {}, assignments};
    for (const auto& e : report.at("entries")) {
      if (e.at("provenance").get<std::string>() != "collective") continue;
      const auto idx = inputs.corpus.index_of_source(e.at("page_id").get<std::int64_t>());
      if (!idx) throw ReferentialError(report_path.string() + ": entry outside the corpus");
      grasp.sample.push_back(*idx);
    }

    std::vector<MethodSample> methods;
    for (const auto& name : config.methods) {
      if (name == "grasp") {
        methods.push_back(grasp);
      } else if (name == "random") {
        methods.push_back(random_method(inputs.corpus.size(), grasp.sample.size(),
                                        seed ^ kRandomBaselineStream, assignments));
      } else if (name.starts_with("sdc_")) {
        std::string kind_name = name.substr(4);
        const bool with_pca = kind_name.ends_with("+pca");
        if (with_pca) kind_name.resize(kind_name.size() - 4);
        const auto kind = parse_sdc_kind(kind_name);
        if (!kind) throw InputError("unknown method " + name);
        if (with_pca && !pca_noted) {
          notes.push_back("+pca rows use PCA to " + std::to_string(config.pca_dim) +
                          " dimensions as the dimension-reduction baseline in place of t-SNE");
          pca_noted = true;
        }
        methods.push_back(sdc_method(inputs.corpus, *kind,
                                     with_pca ? std::optional<int>(config.pca_dim) : std::nullopt,
                                     site_config.refinement.k, seed,
                                     site_config.refinement.kmeans));
      } else {
        throw InputError("unknown method " + name);
      }
    }

    out["sites"].push_back(report_path.string());
    for (const auto which : config.spaces) {
      const auto space = inputs.space(which, nullptr, nullptr);
      if (!space) {
        notes.push_back(report_path.string() + ": " + std::string(to_string(which)) +
                        " space skipped: no embeddings available");
        continue;
      }
      for (const auto& m : methods) {
        const auto row = evaluate_space(m.label, m.assignments, *space, m.sample,
                                        site_config.intra_mode);
        auto j = to_json(row);
        j["site"] = report_path.string();
        out["rows"].push_back(std::move(j));
        const auto key = std::make_pair(row.method_label, row.space);
        auto [it, inserted] = sums.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.s += row.s_sampled;
        it->second.intra += row.intra_mean;
        it->second.d += row.d_intra_inter;
        ++it->second.sites;
      }
    }
  }

  out["mean"] = ojson::array();
  for (const auto& key : order) {
    const auto& s = sums.at(key);
    out["mean"].push_back({{"method", key.first},
                           {"space", key.second},
                           {"S_sampled", s.s / s.sites},
                           {"intra_mean", s.intra / s.sites},
                           {"D_intra_inter", s.d / s.sites},
                           {"sites", s.sites}});
  }
  out["notes"] = notes;
  return out;
}

}  // namespace grasp
