#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "grasp/corpus.hpp"
#include "grasp/error.hpp"
#include "test_util.hpp"

namespace grasp {
namespace {

using testing::TempDir;
using testing::write_file;
using testing::write_small_corpus;

TEST(LoadCorpus, ThreePagesTwoEdges) {
  TempDir dir;
  write_small_corpus(dir.path(), {"<p>a</p>", "<p>b</p>", "<p>c</p>"}, "0\t1\n1\t2\n");
  const auto c = load_corpus_dir(dir.path());
  EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(c.graph.size(), 3u);
  EXPECT_EQ(c.graph.edges().size(), 2u);
  EXPECT_TRUE(c.graph.contains(0, 1));
  EXPECT_FALSE(c.graph.contains(1, 0));
}

TEST(LoadCorpus, DuplicateEdgesCollapse) {
  TempDir dir;
  write_small_corpus(dir.path(), {"", "", ""}, "0\t1\n0\t1\n");
  EXPECT_EQ(load_corpus_dir(dir.path()).graph.edges().size(), 1u);
}

TEST(LoadCorpus, UnknownEndpointNamesId) {
  TempDir dir;
  write_small_corpus(dir.path(), {"", "", ""}, "0\t7\n");
  try {
    load_corpus_dir(dir.path());
    FAIL() << "expected a referential error";
  } catch (const ReferentialError& e) {
    EXPECT_NE(std::string(e.what()).find('7'), std::string::npos);
  }
}

TEST(LoadCorpus, MalformedLineReportsLineNumber) {
  TempDir dir;
  write_small_corpus(dir.path(), {"", ""}, "");
  auto manifest = testing::read_file(dir / "manifest.jsonl");
  write_file(dir / "manifest.jsonl", manifest + "{not json\n");
  try {
    load_corpus_dir(dir.path());
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadCorpus, MalformedEdgeLine) {
  TempDir dir;
  write_small_corpus(dir.path(), {"", ""}, "0\t1\nzero one\n");
  try {
    load_corpus_dir(dir.path());
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadCorpus, AutocheckLengthChecked) {
  TempDir dir;
  write_file(dir / "manifest.jsonl",
             R"({"page_id": 0, "url": "https://x.test/", "dom_path": "a.html", "autocheck": [1, 2]})"
             "\n");
  write_file(dir / "edges.tsv", "");
  EXPECT_THROW(load_corpus_dir(dir.path()), SchemaError);

  std::string counts = "[0";
  for (std::size_t i = 1; i < kAutocheckRules; ++i) counts += "," + std::to_string(i % 3);
  counts += "]";
  write_file(dir / "manifest.jsonl",
             R"({"page_id": 0, "url": "https://x.test/", "dom_path": "a.html", "autocheck": )" +
                 counts + "}\n");
  const auto c = load_corpus_dir(dir.path());
  ASSERT_TRUE(c.pages[0].autocheck);
  EXPECT_EQ(c.pages[0].autocheck->size(), kAutocheckRules);
}

TEST(LoadCorpus, ReindexesPreservingManifestOrder) {
  TempDir dir;
  write_file(dir / "manifest.jsonl",
             R"({"page_id": 40, "url": "https://x.test/a", "dom_path": "a.html"})"
             "\n"
             R"({"page_id": 7, "url": "https://x.test/b", "dom_path": "b.html"})"
             "\n"
             R"({"page_id": 19, "url": "https://x.test/c", "dom_path": "c.html"})"
             "\n");
  write_file(dir / "edges.tsv", "40\t19\n7\t40\n");
  const auto c = load_corpus_dir(dir.path());
  EXPECT_EQ(c.pages[0].source_id, 40);
  EXPECT_EQ(c.pages[1].source_id, 7);
  EXPECT_EQ(c.index_of_source(19), PageId{2});
  EXPECT_FALSE(c.index_of_source(3));
  EXPECT_TRUE(c.graph.contains(0, 2));
  EXPECT_TRUE(c.graph.contains(1, 0));
}

TEST(LoadCorpus, DuplicatePageIdRejected) {
  TempDir dir;
  write_file(dir / "manifest.jsonl",
             R"({"page_id": 1, "url": "https://x.test/a", "dom_path": "a.html"})"
             "\n"
             R"({"page_id": 1, "url": "https://x.test/b", "dom_path": "b.html"})"
             "\n");
  write_file(dir / "edges.tsv", "");
  EXPECT_THROW(load_corpus_dir(dir.path()), InputError);
}

TEST(LoadCorpus, MissingManifestIsIoError) {
  TempDir dir;
  EXPECT_THROW(load_corpus_dir(dir / "nope"), IoError);
}

TEST(LoadCorpus, Deterministic) {
  TempDir dir;
  write_small_corpus(dir.path(), {"a", "b", "c", "d"}, "3\t0\n0\t1\n2\t1\n");
  const auto a = load_corpus_dir(dir.path());
  const auto b = load_corpus_dir(dir.path());
  EXPECT_EQ(a.graph.edges(), b.graph.edges());
  ASSERT_EQ(a.pages.size(), b.pages.size());
  for (std::size_t i = 0; i < a.pages.size(); ++i) {
    EXPECT_EQ(a.pages[i].url, b.pages[i].url);
    EXPECT_EQ(a.pages[i].dom_path, b.pages[i].dom_path);
  }
}

TEST(LoadCorpus, WriteThenLoadRoundTrip) {
  TempDir dir;
  write_small_corpus(dir.path(), {"a", "b", "c"}, "0\t1\n2\t0\n");
  const auto a = load_corpus_dir(dir.path());
  TempDir out;
  write_corpus(a, out.path());
  const auto b = load_corpus(out / kManifestFile, out / kEdgesFile);
  EXPECT_EQ(a.graph.edges(), b.graph.edges());
  EXPECT_EQ(a.pages[2].url, b.pages[2].url);
}

TEST(LinkGraph, DropsSelfLoopsAndDuplicates) {
  const auto g = LinkGraph::from_edges(3, {{1, 1}, {0, 2}, {0, 2}, {2, 0}});
  EXPECT_EQ(g.edges().size(), 2u);
  EXPECT_THROW(LinkGraph::from_edges(2, {{0, 2}}), ReferentialError);
}

Eigen::MatrixXd dense(const SparseMatrix& m) { return Eigen::MatrixXd(m); }

TEST(BuildAdjacency, Examples) {
  const auto g = LinkGraph::from_edges(2, {{0, 1}});
  Eigen::MatrixXd sym(2, 2);
  sym << 0, 1, 1, 0;
  EXPECT_EQ(dense(build_adjacency(g, true)), sym);
  Eigen::MatrixXd directed(2, 2);
  directed << 0, 1, 0, 0;
  EXPECT_EQ(dense(build_adjacency(g, false)), directed);
  EXPECT_EQ(dense(build_adjacency(LinkGraph::from_edges(2, {}))), Eigen::MatrixXd::Zero(2, 2));
}

TEST(BuildAdjacency, BothDirectionsStayBinary) {
  const auto a = dense(build_adjacency(LinkGraph::from_edges(2, {{0, 1}, {1, 0}})));
  EXPECT_EQ(a(0, 1), 1.0);
  EXPECT_EQ(a(1, 0), 1.0);
}

TEST(BuildAdjacency, RandomGraphsSymmetricZeroDiagonal) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<DirectedEdge> edges;
    for (int e = 0; e < 60; ++e) {
      edges.push_back({static_cast<PageId>(rng() % n), static_cast<PageId>(rng() % n)});
    }
    const auto a = dense(build_adjacency(LinkGraph::from_edges(n, edges)));
    EXPECT_EQ(a, a.transpose());
    EXPECT_EQ(a.diagonal().squaredNorm(), 0.0);
    EXPECT_TRUE(((a.array() == 0.0) || (a.array() == 1.0)).all());
  }
}

TEST(ValidateCorpus, CleanCorpus) {
  TempDir dir;
  write_small_corpus(dir.path(), {"a", "b"}, "0\t1\n");
  const auto r = validate_corpus(load_corpus_dir(dir.path()));
  EXPECT_TRUE(r.ok);
  EXPECT_TRUE(r.errors.empty());
  EXPECT_TRUE(r.warnings.empty());
}

TEST(ValidateCorpus, MissingScreenshotWarns) {
  TempDir dir;
  write_small_corpus(dir.path(), {"a", "b"}, "0\t1\n");
  auto c = load_corpus_dir(dir.path());
  c.pages[0].screenshot_path = "shots/0.png";
  const auto r = validate_corpus(c);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(ValidateCorpus, MissingDomIsError) {
  TempDir dir;
  write_small_corpus(dir.path(), {"a", "b"}, "0\t1\n");
  std::filesystem::remove(dir / "dom/1.html");
  const auto r = validate_corpus(load_corpus_dir(dir.path()));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.errors.size(), 1u);
}

TEST(ValidateCorpus, IsolatedNodeAndDuplicateUrlWarn) {
  TempDir dir;
  write_small_corpus(dir.path(), {"a", "b", "c"}, "0\t1\n");
  auto c = load_corpus_dir(dir.path());
  c.pages[1].url = c.pages[0].url;
  const auto r = validate_corpus(c);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.warnings.size(), 2u);
  const auto j = to_json(r);
  EXPECT_EQ(j["ok"], true);
  EXPECT_EQ(j["warnings"].size(), 2u);
}

}  // namespace
}  // namespace grasp
