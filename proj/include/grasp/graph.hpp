#pragma once

#include <optional>
#include <string_view>

#include "grasp/corpus.hpp"
#include "grasp/embeddings.hpp"

namespace grasp {

enum class GnnVariant {
  kHomophilic,    // H_g = Â^L X
  kHeterophilic,  // H_g = X || ÂX || ... || Â^L X
};

enum class AdjacencyNorm {
  kRow,        // D^-1 (A + I)
  kSymmetric,  // D^-1/2 (A + I) D^-1/2
};

std::string_view to_string(GnnVariant variant);
std::optional<GnnVariant> parse_gnn_variant(std::string_view name);
std::string_view to_string(AdjacencyNorm norm);
std::optional<AdjacencyNorm> parse_adjacency_norm(std::string_view name);

inline constexpr int kMaxPropagationLayers = 8;

struct PropagationParams {
  GnnVariant variant = GnnVariant::kHomophilic;
  int layers = 2;
  AdjacencyNorm norm = AdjacencyNorm::kRow;

  // Throws ContractError unless 0 <= layers <= kMaxPropagationLayers.
  void validate() const;
};

// Adds self-loops and normalizes. Requires a symmetric matrix with an empty
// diagonal (ContractError otherwise). Row mode yields a row-stochastic matrix.
SparseMatrix normalize_adjacency(const SparseMatrix& adjacency,
                                 AdjacencyNorm norm = AdjacencyNorm::kRow);

// Parameter-free propagation over a normalized adjacency.
EmbeddingMatrix propagate(const EmbeddingMatrix& features, const SparseMatrix& normalized,
                          const PropagationParams& params);

}  // namespace grasp
