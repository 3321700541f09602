#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "grasp/corpus.hpp"

namespace grasp {

enum class Space { kText, kVisual, kFused, kGraph };

std::string_view to_string(Space space);
std::optional<Space> parse_space(std::string_view name);

using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Immutable n x d float32 matrix whose rows are keyed by page id.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  // Throws SchemaError on duplicate ids or a row-count mismatch, DataError on
  // a non-finite entry.
  EmbeddingMatrix(std::vector<PageId> ids, RowMatrixF data, Space space);

  const std::vector<PageId>& ids() const { return ids_; }
  const RowMatrixF& data() const { return data_; }
  Space space() const { return space_; }
  Eigen::Index rows() const { return data_.rows(); }
  Eigen::Index cols() const { return data_.cols(); }
  std::optional<Eigen::Index> row_of(PageId id) const;

  Eigen::MatrixXd to_double() const { return data_.cast<double>(); }

  // Reorders rows to follow `order`; throws AlignmentError if an id is missing
  // or the id sets differ.
  EmbeddingMatrix aligned_to(const std::vector<PageId>& order) const;

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.space_ == b.space_ && a.ids_ == b.ids_ && a.data_ == b.data_;
  }

 private:
  std::vector<PageId> ids_;
  RowMatrixF data_;
  Space space_ = Space::kText;
};

// Exchange format: ids file (one decimal id per line) + raw little-endian
// float32 row-major matrix without header.
EmbeddingMatrix load_embedding_files(const std::filesystem::path& ids_path,
                                     const std::filesystem::path& matrix_path, int dim,
                                     Space space = Space::kText);
void store_embedding_files(const EmbeddingMatrix& matrix, const std::filesystem::path& ids_path,
                           const std::filesystem::path& matrix_path);

// "<dir>/<space>.ids.txt" and "<dir>/<space>.f32".
std::filesystem::path exchange_ids_path(const std::filesystem::path& dir, Space space);
std::filesystem::path exchange_matrix_path(const std::filesystem::path& dir, Space space);

// Maps ids from manifest page_ids to loaded corpus indices and orders rows by
// corpus page order.
EmbeddingMatrix align_to_corpus(const EmbeddingMatrix& matrix, const Corpus& corpus);

EmbeddingMatrix zero_embedding(const std::vector<PageId>& ids, int dim, Space space);

// X = norm(H_t) || norm(H_v), rows matched by id and ordered like `text`.
EmbeddingMatrix fuse_modalities(const EmbeddingMatrix& text, const EmbeddingMatrix& visual);

// Signed feature hashing of token lists into `dim` buckets, rows L2-normalized.
EmbeddingMatrix hash_embed_tokens(const std::vector<std::vector<std::string>>& token_lists,
                                  const std::vector<PageId>& ids, int dim, std::uint64_t seed,
                                  Space space);

// Tokens are lowercased tag names plus whitespace-split visible text.
std::vector<std::string> dom_tokens(std::string_view dom);

EmbeddingMatrix hash_embed(const Corpus& corpus, int dim, std::uint64_t seed);

}  // namespace grasp
