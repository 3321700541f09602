#include <gtest/gtest.h>

#include <map>
#include <set>

#include "grasp/baselines.hpp"
#include "grasp/clustering.hpp"
#include "grasp/error.hpp"
#include "grasp/synth.hpp"
#include "test_util.hpp"

namespace grasp {
namespace {

using testing::TempDir;

constexpr const char* kSmallDom = "<html><body><p>a</p><p>b</p></body></html>";

TEST(DomStatistics, TagsAndTree) {
  const auto s = dom_statistics(kSmallDom);
  EXPECT_EQ(s.tag_counts, (std::map<std::string, int>{{"html", 1}, {"body", 1}, {"p", 2}}));
  EXPECT_EQ(s.max_depth, 3);
  EXPECT_EQ(s.node_count, 4);
  EXPECT_EQ(s.tag_bigrams.at("body>p"), 2);
  EXPECT_EQ(s.word_counts.at("a"), 1);
  EXPECT_EQ(s.branching[0], 2);  // the two leaves
  EXPECT_EQ(s.branching[2], 1);  // body
}

Corpus corpus_with_doms(const TempDir& dir, const std::vector<std::string>& doms) {
  testing::write_small_corpus(dir.path(), doms, "");
  return load_corpus_dir(dir.path());
}

TEST(SdcFeatures, IdenticalDomsGiveIdenticalRows) {
  TempDir dir;
  const auto c = corpus_with_doms(dir, {kSmallDom, "<div><span>x</span></div>", kSmallDom});
  for (const auto kind : {SdcKind::kContent, SdcKind::kStructure, SdcKind::kStrucCont,
                          SdcKind::kTags, SdcKind::kTree}) {
    const auto f = sdc_features(c, kind);
    EXPECT_EQ(f.rows(), 3);
    EXPECT_EQ(f.data().row(0), f.data().row(2)) << to_string(kind);
  }
}

TEST(SdcFeatures, IndependentOfPageOrder) {
  const std::vector<std::string> doms = {kSmallDom, "<div><span>x y</span></div>",
                                         "<ul><li>a</li><li>b</li><li>c</li></ul>"};
  TempDir a;
  TempDir b;
  const auto ca = corpus_with_doms(a, doms);
  const auto cb = corpus_with_doms(b, {doms[2], doms[0], doms[1]});
  for (const auto kind : {SdcKind::kContent, SdcKind::kTags, SdcKind::kTree}) {
    const auto fa = sdc_features(ca, kind);
    const auto fb = sdc_features(cb, kind);
    EXPECT_EQ(fa.data().row(0), fb.data().row(1));
    EXPECT_EQ(fa.data().row(2), fb.data().row(0));
  }
}

TEST(SdcFeatures, FeatureTableCounts) {
  const auto table = sdc_feature_table({dom_statistics(kSmallDom)}, SdcKind::kTags);
  std::map<std::string, double> counts;
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    counts[table.columns[j]] = table.values(0, static_cast<Eigen::Index>(j));
  }
  EXPECT_EQ(counts["tag:p"], 2.0);
  EXPECT_EQ(counts["tag:html"], 1.0);
}

TEST(ParseSdcKind, RoundTrip) {
  for (const auto kind : {SdcKind::kContent, SdcKind::kStructure, SdcKind::kStrucCont,
                          SdcKind::kTags, SdcKind::kTree}) {
    EXPECT_EQ(parse_sdc_kind(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_sdc_kind("tsne"));
}

TEST(Pca, RankOneData) {
  RowMatrixF x(6, 3);
  for (int i = 0; i < 6; ++i) x.row(i) << static_cast<float>(i), 2.0f * i, -1.0f * i;
  std::vector<PageId> ids(6);
  std::iota(ids.begin(), ids.end(), PageId{0});
  const auto r = pca(EmbeddingMatrix(ids, x, Space::kText), 2);
  EXPECT_GE(r.explained_variance_ratio(0), 0.999);
  EXPECT_EQ(r.projected.cols(), 2);
  EXPECT_NEAR(r.projected.data().col(1).norm(), 0.0f, 1e-4f);
}

TEST(Pca, FullBasisReconstructsCenteredInput) {
  std::mt19937_64 rng(1);
  const auto e = testing::random_matrix(rng, 20, 4);
  const auto r = pca(e, 4);
  const Eigen::MatrixXd centered = e.to_double().rowwise() - r.mean;
  const Eigen::MatrixXd back = r.projected.to_double() * r.components.transpose();
  EXPECT_TRUE(back.isApprox(centered, 1e-5));
  EXPECT_TRUE((r.components.transpose() * r.components).isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-9));
  EXPECT_NEAR(r.explained_variance_ratio.sum(), 1.0, 1e-9);
}

TEST(Pca, DuplicateColumnPreservesDistances) {
  std::mt19937_64 rng(2);
  const auto base = testing::random_matrix(rng, 15, 2);
  RowMatrixF x(15, 3);
  x.leftCols(2) = base.data();
  x.col(2) = base.data().col(0);
  const auto r = pca(EmbeddingMatrix(base.ids(), x, Space::kText), 2);
  const auto p = r.projected.to_double();
  const auto orig = EmbeddingMatrix(base.ids(), x, Space::kText).to_double();
  for (int i = 0; i < 15; ++i) {
    for (int j = i + 1; j < 15; ++j) {
      EXPECT_NEAR((p.row(i) - p.row(j)).norm(), (orig.row(i) - orig.row(j)).norm(), 1e-4);
    }
  }
}

TEST(Pca, TargetOutOfRange) {
  std::mt19937_64 rng(3);
  const auto e = testing::random_matrix(rng, 10, 3);
  EXPECT_THROW(pca(e, 4), ContractError);
  EXPECT_THROW(pca(e, 0), ContractError);
}

TEST(Synth, SizesAndLabels) {
  SynthSpec spec;
  spec.k_types = 3;
  spec.pages_per_type = 10;
  spec.seed = 4;
  const auto site = generate_site(spec);
  EXPECT_EQ(site.doms.size(), 30u);
  std::map<int, int> per_label;
  for (const auto l : site.labels) ++per_label[l];
  EXPECT_EQ(per_label, (std::map<int, int>{{0, 10}, {1, 10}, {2, 10}}));
}

TEST(Synth, ByteIdenticalOutput) {
  SynthSpec spec;
  spec.k_types = 4;
  spec.pages_per_type = 5;
  spec.seed = 11;
  TempDir a;
  TempDir b;
  generate_corpus(spec, a.path());
  generate_corpus(spec, b.path());
  for (const auto* name : {"manifest.jsonl", "edges.tsv", "truth.json", "visual.f32", "dom/7.html"}) {
    EXPECT_EQ(testing::read_file(a / name), testing::read_file(b / name)) << name;
  }
}

TEST(Synth, PureHomophilyHasNoCrossEdges) {
  SynthSpec spec;
  spec.k_types = 5;
  spec.pages_per_type = 8;
  spec.homophily = 1.0;
  spec.noise_edges = 0;
  spec.seed = 5;
  const auto site = generate_site(spec);
  for (const auto& e : site.edges) EXPECT_EQ(site.labels[e.src], site.labels[e.dst]);
}

TEST(Synth, EachTypeIsConnected) {
  SynthSpec spec;
  spec.k_types = 6;
  spec.pages_per_type = 9;
  spec.seed = 6;
  const auto site = generate_site(spec);
  const auto n = site.labels.size();
  std::vector<std::vector<PageId>> adj(n);
  for (const auto& e : site.edges) {
    if (site.labels[e.src] != site.labels[e.dst]) continue;
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  for (int t = 0; t < spec.k_types; ++t) {
    PageId start = 0;
    while (site.labels[start] != t) ++start;
    std::set<PageId> seen = {start};
    std::vector<PageId> stack = {start};
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto v : adj[u]) {
        if (seen.insert(v).second) stack.push_back(v);
      }
    }
    EXPECT_EQ(seen.size(), static_cast<std::size_t>(spec.pages_per_type));
  }
}

// Mean within-type cosine minus mean cross-type cosine of the text channel.
double type_gap(double separation) {
  SynthSpec spec;
  spec.k_types = 4;
  spec.pages_per_type = 8;
  spec.separation = separation;
  spec.seed = 7;
  TempDir dir;
  const auto s = generate_corpus(spec, dir.path());
  const auto x = hash_embed(s.corpus, 256, 0).to_double();
  double within = 0.0;
  double across = 0.0;
  int nw = 0;
  int na = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      const double c = x.row(i).dot(x.row(j));
      if (s.truth[static_cast<std::size_t>(i)] == s.truth[static_cast<std::size_t>(j)]) {
        within += c;
        ++nw;
      } else {
        across += c;
        ++na;
      }
    }
  }
  return within / nw - across / na;
}

TEST(Synth, SeparationSharpensTypes) {
  const double lo = type_gap(0.5);
  const double mid = type_gap(2.0);
  const double hi = type_gap(8.0);
  EXPECT_LT(lo, mid);
  EXPECT_LT(mid, hi);
}

TEST(Synth, HighSeparationClustersRecoverTypes) {
  SynthSpec spec;
  spec.k_types = 3;
  spec.pages_per_type = 10;
  spec.separation = 8.0;
  spec.seed = 8;
  TempDir dir;
  const auto s = generate_corpus(spec, dir.path());
  const auto r = kmeans(hash_embed(s.corpus, 256, 0), 3, 1);
  std::map<int, std::set<int>> clusters_of_type;
  for (std::size_t i = 0; i < s.truth.size(); ++i) clusters_of_type[s.truth[i]].insert(r.assignments[i]);
  std::set<int> used;
  for (const auto& [type, clusters] : clusters_of_type) {
    ASSERT_EQ(clusters.size(), 1u);
    EXPECT_TRUE(used.insert(*clusters.begin()).second);
  }
  EXPECT_EQ(load_truth(dir / "truth.json"), s.truth);
}

TEST(Synth, InvalidSpec) {
  SynthSpec spec;
  spec.k_types = 1;
  EXPECT_THROW(generate_site(spec), ContractError);
  spec = {};
  spec.homophily = 1.5;
  EXPECT_THROW(generate_site(spec), ContractError);
}

TEST(RecoveryScore, Examples) {
  const std::vector<int> truth = {0, 0, 1, 1, 2, 2};
  EXPECT_DOUBLE_EQ(recovery_score(std::vector<PageId>{0, 2, 4}, truth), 1.0);
  EXPECT_DOUBLE_EQ(recovery_score(std::vector<PageId>{0, 1}, truth), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(recovery_score(std::vector<PageId>{}, truth), 0.0);
  EXPECT_THROW(recovery_score(std::vector<PageId>{6}, truth), ReferentialError);
  SampleSet sample;
  sample.entries = {{0, Provenance::kCollective, 0}, {2, Provenance::kRandom, std::nullopt}};
  EXPECT_DOUBLE_EQ(recovery_score(sample, truth), 1.0 / 3.0);
}

}  // namespace
}  // namespace grasp
