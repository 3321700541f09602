#include "grasp/embeddings.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "grasp/error.hpp"
#include "grasp/html.hpp"

namespace grasp {
namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a over the token, keyed by the seed and finished with a mixer so that
// both the bucket (low bits) and the sign (top bit) are well spread.
std::uint64_t seeded_hash(std::string_view token, std::uint64_t seed) {
  std::uint64_t h = 0xCBF29CE484222325ULL ^ splitmix64(seed);
  for (unsigned char c : token) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return splitmix64(h);
}

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
  }
  return v;
}

void normalize_rows(Eigen::Ref<RowMatrixF> m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).cast<double>().norm();
    if (norm > 0.0) m.row(i) = (m.row(i).cast<double>() / norm).cast<float>();
  }
}

}  // namespace

std::string_view to_string(Space space) {
  switch (space) {
    case Space::kText:
      return "text";
    case Space::kVisual:
      return "visual";
    case Space::kFused:
      return "fused";
    case Space::kGraph:
      return "graph";
  }
  return "unknown";
}

std::optional<Space> parse_space(std::string_view name) {
  for (const auto s : {Space::kText, Space::kVisual, Space::kFused, Space::kGraph}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

EmbeddingMatrix::EmbeddingMatrix(std::vector<PageId> ids, RowMatrixF data, Space space)
    : ids_(std::move(ids)), data_(std::move(data)), space_(space) {
  if (static_cast<Eigen::Index>(ids_.size()) != data_.rows()) {
    throw SchemaError("embedding has " + std::to_string(data_.rows()) + " rows but " +
                      std::to_string(ids_.size()) + " ids");
  }
  std::unordered_set<PageId> seen;
  for (const auto id : ids_) {
    if (!seen.insert(id).second) {
      throw SchemaError("duplicate page id " + std::to_string(id) + " in embedding ids");
    }
  }
  if (!data_.allFinite()) throw DataError("embedding contains a non-finite value");
}

std::optional<Eigen::Index> EmbeddingMatrix::row_of(PageId id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == id) return static_cast<Eigen::Index>(i);
  }
  return std::nullopt;
}

EmbeddingMatrix EmbeddingMatrix::aligned_to(const std::vector<PageId>& order) const {
  if (order.size() != ids_.size()) {
    throw AlignmentError("id sets differ in size (" + std::to_string(order.size()) + " vs " +
                         std::to_string(ids_.size()) + ")");
  }
  std::unordered_map<PageId, Eigen::Index> row;
  for (std::size_t i = 0; i < ids_.size(); ++i) row.emplace(ids_[i], static_cast<Eigen::Index>(i));
  RowMatrixF out(data_.rows(), data_.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto it = row.find(order[i]);
    if (it == row.end()) {
      throw AlignmentError("page id " + std::to_string(order[i]) + " missing from " +
                           std::string(to_string(space_)) + " embedding");
    }
    out.row(static_cast<Eigen::Index>(i)) = data_.row(it->second);
  }
  return EmbeddingMatrix(order, std::move(out), space_);
}

EmbeddingMatrix load_embedding_files(const fs::path& ids_path, const fs::path& matrix_path,
                                     int dim, Space space) {
  if (dim <= 0) throw ContractError("embedding dimension must be positive");
  std::ifstream ids_in(ids_path);
  if (!ids_in) throw IoError("cannot open ids file " + ids_path.string());
  std::vector<PageId> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ids_in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t consumed = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(line, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed != line.size() || line[0] == '-' || v > UINT32_MAX) {
      throw ParseError(ids_path.string(), lineno, "expected a decimal page id");
    }
    ids.push_back(static_cast<PageId>(v));
  }

  std::ifstream bin(matrix_path, std::ios::binary);
  if (!bin) throw IoError("cannot open matrix file " + matrix_path.string());
  const auto bytes = fs::file_size(matrix_path);
  const auto expected = 4ULL * ids.size() * static_cast<unsigned long long>(dim);
  if (bytes != expected) {
    throw SizeMismatchError(matrix_path.string() + " holds " + std::to_string(bytes) +
                            " bytes, expected 4*" + std::to_string(ids.size()) + "*" +
                            std::to_string(dim) + " = " + std::to_string(expected));
  }
  RowMatrixF data(static_cast<Eigen::Index>(ids.size()), dim);
  std::vector<std::uint32_t> raw(static_cast<std::size_t>(data.size()));
  bin.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
  if (!bin) throw IoError("short read on " + matrix_path.string());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    data.data()[i] = std::bit_cast<float>(to_little_endian(raw[i]));
  }
  if (!data.allFinite()) throw DataError(matrix_path.string() + " contains a non-finite value");
  return EmbeddingMatrix(std::move(ids), std::move(data), space);
}

void store_embedding_files(const EmbeddingMatrix& matrix, const fs::path& ids_path,
                           const fs::path& matrix_path) {
  std::ofstream ids_out(ids_path, std::ios::binary);
  if (!ids_out) throw IoError("cannot write " + ids_path.string());
  for (const auto id : matrix.ids()) ids_out << id << '\n';
  std::ofstream bin(matrix_path, std::ios::binary);
  if (!bin) throw IoError("cannot write " + matrix_path.string());
  const auto& d = matrix.data();
  std::vector<std::uint32_t> raw(static_cast<std::size_t>(d.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = to_little_endian(std::bit_cast<std::uint32_t>(d.data()[i]));
  }
  bin.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(std::uint32_t)));
}

fs::path exchange_ids_path(const fs::path& dir, Space space) {
  return dir / (std::string(to_string(space)) + ".ids.txt");
}

fs::path exchange_matrix_path(const fs::path& dir, Space space) {
  return dir / (std::string(to_string(space)) + ".f32");
}

EmbeddingMatrix align_to_corpus(const EmbeddingMatrix& matrix, const Corpus& corpus) {
  std::vector<PageId> mapped;
  mapped.reserve(matrix.ids().size());
  for (const auto id : matrix.ids()) {
    const auto idx = corpus.index_of_source(id);
    if (!idx) {
      throw AlignmentError("embedding row for page id " + std::to_string(id) +
                           " has no page in the corpus");
    }
    mapped.push_back(*idx);
  }
  std::vector<PageId> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<PageId>(i);
  return EmbeddingMatrix(std::move(mapped), matrix.data(), matrix.space()).aligned_to(order);
}

EmbeddingMatrix zero_embedding(const std::vector<PageId>& ids, int dim, Space space) {
  return EmbeddingMatrix(ids, RowMatrixF::Zero(static_cast<Eigen::Index>(ids.size()), dim),
                         space);
}

EmbeddingMatrix fuse_modalities(const EmbeddingMatrix& text, const EmbeddingMatrix& visual) {
  const EmbeddingMatrix v = visual.aligned_to(text.ids());
  RowMatrixF fused(text.rows(), text.cols() + v.cols());
  fused.leftCols(text.cols()) = text.data();
  fused.rightCols(v.cols()) = v.data();
  normalize_rows(fused.leftCols(text.cols()));
  normalize_rows(fused.rightCols(v.cols()));
  return EmbeddingMatrix(text.ids(), std::move(fused), Space::kFused);
}

EmbeddingMatrix hash_embed_tokens(const std::vector<std::vector<std::string>>& token_lists,
                                  const std::vector<PageId>& ids, int dim, std::uint64_t seed,
                                  Space space) {
  if (dim <= 0) throw ContractError("hash embedding dimension must be positive");
  if (token_lists.size() != ids.size()) {
    throw ContractError("hash_embed_tokens: one token list per id required");
  }
  RowMatrixF data = RowMatrixF::Zero(static_cast<Eigen::Index>(ids.size()), dim);
  for (std::size_t i = 0; i < token_lists.size(); ++i) {
    for (const auto& tok : token_lists[i]) {
      const auto h = seeded_hash(tok, seed);
      const auto bucket = static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim));
      data(static_cast<Eigen::Index>(i), bucket) += (h >> 63) ? -1.0f : 1.0f;
    }
  }
  normalize_rows(data);
  return EmbeddingMatrix(ids, std::move(data), space);
}

std::vector<std::string> dom_tokens(std::string_view dom) {
  const auto tokens = html::tokenize(dom);
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (t.kind == html::Token::Kind::kStartTag) out.push_back("<" + t.name + ">");
  }
  auto words = html::text_words(tokens);
  out.insert(out.end(), std::make_move_iterator(words.begin()),
             std::make_move_iterator(words.end()));
  return out;
}

EmbeddingMatrix hash_embed(const Corpus& corpus, int dim, std::uint64_t seed) {
  std::vector<std::vector<std::string>> token_lists;
  std::vector<PageId> ids;
  token_lists.reserve(corpus.size());
  for (const auto& page : corpus.pages) {
    token_lists.push_back(dom_tokens(read_dom(corpus, page.page_id)));
    ids.push_back(page.page_id);
  }
  return hash_embed_tokens(token_lists, ids, dim, seed, Space::kText);
}

}  // namespace grasp
