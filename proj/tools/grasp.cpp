// grasp: representative page sampling for site-level accessibility audits.
//
// Subcommands: crawl, synth, sample, eval, validate. Exit codes: 0 success,
// 2 input or configuration error, 3 pipeline error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grasp/corpus.hpp"
#include "grasp/crawler.hpp"
#include "grasp/error.hpp"
#include "grasp/pipeline.hpp"
#include "grasp/synth.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitInput = 2;
constexpr int kExitPipeline = 3;

bool ci_mode() {
  const char* ci = std::getenv("CI");
  return ci != nullptr && std::string(ci) != "" && std::string(ci) != "0" &&
         std::string(ci) != "false";
}

template <typename T, typename Parse>
T parse_choice(const std::string& flag, const std::string& value, Parse parse) {
  const auto v = parse(value);
  if (!v) throw grasp::InputError("invalid value for " + flag + ": " + value);
  return *v;
}

std::vector<grasp::Space> parse_spaces(const std::string& csv) {
  std::vector<grasp::Space> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(parse_choice<grasp::Space>("--spaces", item, grasp::parse_space));
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct SampleArgs {
  std::string corpus;
  std::string embeddings = "hash";
  std::string embeddings_dir;
  int hash_dim = 256;
  int text_dim = 0;
  int visual_dim = 0;
  int k = 20;
  int iters = 5;
  double gamma = 0.3;
  double beta = 0.95;
  std::string threshold_mode = "absolute";
  std::string refine_mode = "union";
  std::uint64_t seed = 0;
  std::string gnn = "homophilic";
  int layers = 2;
  std::string adjacency_norm = "row";
  int kmeans_restarts = 10;
  std::string structured;
  std::string processes;
  std::string random_base = "structured";
  std::string intra_mode = "per-cluster";
  std::string metric_spaces = "text,visual";
  std::string out = "report.json";
  std::string metrics_out;
  std::string sites;
  int parallel_sites = 1;
  std::string out_dir = "grasp-out";
};

grasp::PipelineConfig to_config(const SampleArgs& a) {
  grasp::PipelineConfig c;
  c.corpus_dir = a.corpus;
  c.source = parse_choice<grasp::EmbeddingSource>("--embeddings", a.embeddings,
                                                  grasp::parse_embedding_source);
  c.embeddings_dir = a.embeddings_dir;
  c.hash_dim = a.hash_dim;
  if (a.text_dim > 0) c.text_dim = a.text_dim;
  if (a.visual_dim > 0) c.visual_dim = a.visual_dim;
  c.seed = a.seed;
  c.refinement.k = a.k;
  c.refinement.iterations = a.iters;
  c.refinement.gamma = a.gamma;
  c.refinement.beta = a.beta;
  c.refinement.threshold_mode = parse_choice<grasp::ThresholdMode>(
      "--threshold-mode", a.threshold_mode, grasp::parse_threshold_mode);
  c.refinement.refine_mode =
      parse_choice<grasp::RefineMode>("--refine-mode", a.refine_mode, grasp::parse_refine_mode);
  c.refinement.kmeans.restarts = a.kmeans_restarts;
  c.propagation.variant = parse_choice<grasp::GnnVariant>("--gnn", a.gnn, grasp::parse_gnn_variant);
  c.propagation.layers = a.layers;
  c.propagation.norm = parse_choice<grasp::AdjacencyNorm>("--adjacency-norm", a.adjacency_norm,
                                                          grasp::parse_adjacency_norm);
  if (!a.structured.empty()) c.structured_path = a.structured;
  if (!a.processes.empty()) c.processes_path = a.processes;
  c.random_base =
      parse_choice<grasp::RandomBase>("--random-base", a.random_base, grasp::parse_random_base);
  c.intra_mode =
      parse_choice<grasp::IntraMode>("--intra-mode", a.intra_mode, grasp::parse_intra_mode);
  c.metric_spaces = parse_spaces(a.metric_spaces);
  c.report_path = a.out;
  c.metrics_path = a.metrics_out.empty() ? fs::path(a.out).parent_path() / "metrics.json"
                                         : fs::path(a.metrics_out);
  // Parameter validation up front so bad flags are reported as input errors.
  try {
    c.refinement.validate();
    c.propagation.validate();
  } catch (const grasp::ContractError& e) {
    throw grasp::InputError(e.what());
  }
  if (c.hash_dim < 1) throw grasp::InputError("--hash-dim must be positive");
  return c;
}

void print_summary(const grasp::PipelineOutcome& outcome, const grasp::PipelineConfig& config) {
  std::size_t collective = 0;
  std::size_t total = outcome.report["entries"].size();
  for (const auto& e : outcome.report["entries"]) {
    if (e["provenance"] == "collective") ++collective;
  }
  std::cout << "sampled " << total << " pages (" << collective << " collective) from "
            << outcome.report["corpus"]["pages"].get<std::size_t>() << " pages\n";
  for (const auto& row : outcome.metrics["rows"]) {
    std::cout << "  " << row["space"].get<std::string>()
              << ": S_sampled=" << row["S_sampled"].get<double>()
              << " D_intra-inter=" << row["D_intra_inter"].get<double>() << '\n';
  }
  for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "report: " << config.report_path.string()
            << "\nmetrics: " << config.metrics_path.string() << '\n';
}

int run_sample(const SampleArgs& args, bool seed_given) {
  if (ci_mode() && !seed_given) throw grasp::InputError("--seed is mandatory in CI mode");
  if (args.sites.empty()) {
    if (args.corpus.empty()) throw grasp::InputError("--corpus or --sites is required");
    const auto config = to_config(args);
    const auto outcome = grasp::run_pipeline(config);
    print_summary(outcome, config);
    return 0;
  }
  std::ifstream in(args.sites);
  if (!in) throw grasp::IoError("cannot open site list " + args.sites);
  std::vector<grasp::PipelineConfig> configs;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SampleArgs site = args;
    site.corpus = line;
    const auto name = std::to_string(index++) + "_" + fs::path(line).filename().string();
    site.out = (fs::path(args.out_dir) / name / "report.json").string();
    site.metrics_out = (fs::path(args.out_dir) / name / "metrics.json").string();
    configs.push_back(to_config(site));
  }
  const auto results = grasp::run_batch(configs, args.parallel_sites);
  int status = 0;
  for (const auto& r : results) {
    if (r.ok) {
      std::cout << "ok    " << r.corpus_dir.string() << '\n';
    } else {
      std::cerr << "error " << r.corpus_dir.string() << ": " << r.message << '\n';
      status = std::max(status, r.input_error ? kExitInput : kExitPipeline);
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based representative page sampling for accessibility audits"};
  app.set_version_flag("--version", std::string(grasp::kToolVersion));
  app.require_subcommand(1);

  // crawl
  auto* crawl = app.add_subcommand("crawl", "Breadth-first crawl of one site into a corpus");
  std::string seed_url;
  std::string crawl_out;
  grasp::CrawlLimits limits;
  bool allow_external = false;
  crawl->add_option("--seed", seed_url, "Seed URL")->required();
  crawl->add_option("--max-pages", limits.max_pages, "Page budget")->capture_default_str();
  crawl->add_option("--max-depth", limits.max_depth, "Link hops from the seed")
      ->capture_default_str();
  crawl->add_option("--delay-ms", limits.request_delay_ms, "Pause between requests")
      ->capture_default_str();
  crawl->add_flag("--allow-external", allow_external, "Follow links to other origins");
  crawl->add_option("--out", crawl_out, "Output corpus directory")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic site with planted page types");
  grasp::SynthSpec spec;
  std::string synth_out;
  synth->add_option("--types", spec.k_types)->capture_default_str();
  synth->add_option("--pages-per-type", spec.pages_per_type)->capture_default_str();
  synth->add_option("--separation", spec.separation)->capture_default_str();
  synth->add_option("--homophily", spec.homophily)->capture_default_str();
  synth->add_option("--noise-edges", spec.noise_edges)->capture_default_str();
  auto* synth_seed = synth->add_option("--seed", spec.seed)->capture_default_str();
  synth->add_option("--out", synth_out, "Output corpus directory")->required();

  // sample
  auto* sample = app.add_subcommand("sample", "Run the sampler on a corpus (or a batch of corpora)");
  SampleArgs sargs;
  sample->add_option("--corpus", sargs.corpus, "Corpus directory");
  sample->add_option("--embeddings", sargs.embeddings, "hash | files")->capture_default_str();
  sample->add_option("--embeddings-dir", sargs.embeddings_dir,
                     "Directory holding <space>.ids.txt + <space>.f32 (default: corpus)");
  sample->add_option("--hash-dim", sargs.hash_dim)->capture_default_str();
  sample->add_option("--text-dim", sargs.text_dim, "Text embedding width (inferred if unset)");
  sample->add_option("--visual-dim", sargs.visual_dim, "Visual embedding width (inferred if unset)");
  sample->add_option("--k", sargs.k, "Clusters / collective sample size")->capture_default_str();
  sample->add_option("--iters", sargs.iters, "Graph refinement iterations")->capture_default_str();
  sample->add_option("--gamma", sargs.gamma, "Edge removal threshold")->capture_default_str();
  sample->add_option("--beta", sargs.beta, "Edge recovery threshold")->capture_default_str();
  sample->add_option("--threshold-mode", sargs.threshold_mode, "absolute | quantile")
      ->capture_default_str();
  sample->add_option("--refine-mode", sargs.refine_mode, "union | intersection")
      ->capture_default_str();
  auto* sample_seed = sample->add_option("--seed", sargs.seed)->capture_default_str();
  sample->add_option("--gnn", sargs.gnn, "homophilic | heterophilic")->capture_default_str();
  sample->add_option("--layers", sargs.layers)->capture_default_str();
  sample->add_option("--adjacency-norm", sargs.adjacency_norm, "row | symmetric")
      ->capture_default_str();
  sample->add_option("--kmeans-restarts", sargs.kmeans_restarts)->capture_default_str();
  sample->add_option("--structured", sargs.structured, "Structured sample page ids, one per line");
  sample->add_option("--processes", sargs.processes, "Complete-process page ids, one per line");
  sample->add_option("--random-base", sargs.random_base, "structured | collective")
      ->capture_default_str();
  sample->add_option("--intra-mode", sargs.intra_mode, "per-cluster | pooled")
      ->capture_default_str();
  sample->add_option("--metric-spaces", sargs.metric_spaces, "Comma-separated spaces")
      ->capture_default_str();
  sample->add_option("--out", sargs.out, "report.json path")->capture_default_str();
  sample->add_option("--metrics-out", sargs.metrics_out,
                     "metrics.json path (default: next to the report)");
  sample->add_option("--sites", sargs.sites, "Batch mode: file listing one corpus dir per line");
  sample->add_option("--parallel-sites", sargs.parallel_sites, "Batch worker threads")
      ->capture_default_str();
  sample->add_option("--out-dir", sargs.out_dir, "Batch output root")->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "Score samplers against each other");
  grasp::EvalConfig econf;
  std::vector<std::string> reports;
  std::string espaces = "text,visual";
  std::string emethods = "grasp,random";
  std::uint64_t eseed = 0;
  std::string eout = "metrics.json";
  std::string eintra;
  eval->add_option("--report", reports, "report.json from `sample` (repeatable)")->required();
  eval->add_option("--spaces", espaces)->capture_default_str();
  eval->add_option("--methods", emethods,
                   "grasp, random, sdc_<content|structure|struc_cont|tags|tree>[+pca]")
      ->capture_default_str();
  eval->add_option("--pca-dim", econf.pca_dim)->capture_default_str();
  auto* eval_seed = eval->add_option("--seed", eseed, "Baseline seed (default: the report's)");
  eval->add_option("--intra-mode", eintra, "per-cluster | pooled (default: the report's)");
  eval->add_option("--out", eout)->capture_default_str();

  // validate
  auto* validate = app.add_subcommand("validate", "Check a corpus for missing files and graph issues");
  std::string vcorpus;
  std::string vjson;
  validate->add_option("--corpus", vcorpus, "Corpus directory")->required();
  validate->add_option("--json", vjson, "Write the report as JSON to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*crawl) {
      limits.same_origin_only = !allow_external;
      const auto corpus = grasp::crawl_site(seed_url, limits, crawl_out,
                                            [](const std::string& msg) { std::cerr << msg << '\n'; });
      std::cout << "crawled " << corpus.size() << " pages, " << corpus.graph.edges().size()
                << " links -> " << crawl_out << '\n';
      return 0;
    }
    if (*synth) {
      if (ci_mode() && synth_seed->count() == 0) {
        throw grasp::InputError("--seed is mandatory in CI mode");
      }
      try {
        spec.validate();
      } catch (const grasp::ContractError& e) {
        throw grasp::InputError(e.what());
      }
      const auto out = grasp::generate_corpus(spec, synth_out);
      std::cout << "generated " << out.corpus.size() << " pages, " << out.corpus.graph.edges().size()
                << " links -> " << synth_out << '\n';
      return 0;
    }
    if (*sample) return run_sample(sargs, sample_seed->count() > 0);
    if (*eval) {
      for (const auto& r : reports) econf.reports.emplace_back(r);
      econf.spaces = parse_spaces(espaces);
      econf.methods = split_csv(emethods);
      if (eval_seed->count() > 0) econf.seed = eseed;
      if (!eintra.empty()) {
        econf.intra_mode = parse_choice<grasp::IntraMode>("--intra-mode", eintra, grasp::parse_intra_mode);
      }
      econf.out = eout;
      const auto result = grasp::run_eval(econf);
      if (fs::path(eout).has_parent_path()) fs::create_directories(fs::path(eout).parent_path());
      std::ofstream(eout, std::ios::binary) << result.dump(2) << '\n';
      for (const auto& row : result["mean"]) {
        std::cout << row["method"].get<std::string>() << " [" << row["space"].get<std::string>()
                  << "] S_sampled=" << row["S_sampled"].get<double>()
                  << " D_intra-inter=" << row["D_intra_inter"].get<double>() << '\n';
      }
      return 0;
    }
    if (*validate) {
      const auto corpus = grasp::load_corpus_dir(vcorpus);
      const auto report = grasp::validate_corpus(corpus);
      for (const auto& e : report.errors) std::cerr << "error: " << e << '\n';
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      if (!vjson.empty()) std::ofstream(vjson, std::ios::binary) << grasp::to_json(report).dump(2) << '\n';
      std::cout << (report.ok ? "ok" : "invalid") << ": " << report.errors.size() << " errors, "
                << report.warnings.size() << " warnings\n";
      return report.ok ? 0 : kExitInput;
    }
  } catch (const grasp::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPipeline;
  }
  return 0;
}
