#include "grasp/graph.hpp"

#include <cmath>
#include <vector>

#include "grasp/error.hpp"

namespace grasp {

std::string_view to_string(GnnVariant variant) {
  return variant == GnnVariant::kHomophilic ? "homophilic" : "heterophilic";
}

std::optional<GnnVariant> parse_gnn_variant(std::string_view name) {
  if (name == "homophilic" || name == "gcn") return GnnVariant::kHomophilic;
  if (name == "heterophilic") return GnnVariant::kHeterophilic;
  return std::nullopt;
}

std::string_view to_string(AdjacencyNorm norm) {
  return norm == AdjacencyNorm::kRow ? "row" : "symmetric";
}

std::optional<AdjacencyNorm> parse_adjacency_norm(std::string_view name) {
  if (name == "row") return AdjacencyNorm::kRow;
  if (name == "symmetric") return AdjacencyNorm::kSymmetric;
  return std::nullopt;
}

void PropagationParams::validate() const {
  if (layers < 0 || layers > kMaxPropagationLayers) {
    throw ContractError("propagation layers must be in [0, " +
                        std::to_string(kMaxPropagationLayers) + "], got " +
                        std::to_string(layers));
  }
}

SparseMatrix normalize_adjacency(const SparseMatrix& adjacency, AdjacencyNorm norm) {
  const auto n = adjacency.rows();
  if (adjacency.cols() != n) throw ContractError("adjacency must be square");
  const SparseMatrix transposed = adjacency.transpose();
  if ((adjacency - transposed).norm() != 0.0) {
    throw ContractError("adjacency must be symmetric before normalization");
  }
  if (adjacency.diagonal().cwiseAbs().sum() != 0.0) {
    throw ContractError("adjacency must not contain self-loops before normalization");
  }

  SparseMatrix identity(n, n);
  identity.setIdentity();
  SparseMatrix with_loops = adjacency + identity;
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
  for (Eigen::Index r = 0; r < with_loops.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(with_loops, r); it; ++it) degree(r) += it.value();
  }
  for (Eigen::Index r = 0; r < with_loops.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(with_loops, r); it; ++it) {
      if (norm == AdjacencyNorm::kRow) {
        it.valueRef() /= degree(r);
      } else {
        it.valueRef() /= std::sqrt(degree(r) * degree(it.col()));
      }
    }
  }
  return with_loops;
}

EmbeddingMatrix propagate(const EmbeddingMatrix& features, const SparseMatrix& normalized,
                          const PropagationParams& params) {
  params.validate();
  if (normalized.rows() != features.rows() || normalized.cols() != features.rows()) {
    throw ContractError("propagate: adjacency is " + std::to_string(normalized.rows()) + "x" +
                        std::to_string(normalized.cols()) + " but features have " +
                        std::to_string(features.rows()) + " rows");
  }
  const auto d = features.cols();
  Eigen::MatrixXd hop = features.to_double();
  const bool concat = params.variant == GnnVariant::kHeterophilic;
  const auto out_cols = concat ? d * (params.layers + 1) : d;
  Eigen::MatrixXd out(features.rows(), out_cols);
  if (concat) out.leftCols(d) = hop;
  for (int l = 1; l <= params.layers; ++l) {
    hop = normalized * hop;
    if (concat) out.middleCols(d * l, d) = hop;
  }
  if (!concat) out = hop;
  return EmbeddingMatrix(features.ids(), out.cast<float>(), Space::kGraph);
}

}  // namespace grasp
