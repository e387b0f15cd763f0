#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pivotree/pivot_tree.hpp"
#include "pivotree/sparse_vector.hpp"
#include "pivotree/topk.hpp"

namespace pivotree {

enum class BoundKind : std::uint8_t {
  /// Cauchy-Schwarz in the path span and its complement, with the node envelope.
  /// Never below the true subtree maximum at gamma = 1.
  safe = 0,
  /// 1 + 2 a b - a - b with a = ||Sq||, b = ||Sd||. Not admissible in general.
  heuristic = 1,
};

struct BoundVariant {
  BoundKind kind = BoundKind::safe;
  double gamma = 1.0;  ///< multiplies the bound; (0, 1]

  void validate() const;
};

/// The query's projection onto a node's path basis.
struct QueryState {
  std::vector<double> pivot_dots;
  std::vector<double> coords;
  double proj_norm_sq = 0.0;
};

/**
 * Upper estimate of q^T d over documents whose squared projection onto the path span lies
 * in [min_proj_sq, max_proj_sq], given the query's squared projection. Radicands are
 * clamped to [0, 1].
 */
double compute_bound(double min_proj_sq, double max_proj_sq, double query_proj_sq,
                     BoundVariant variant);

inline double compute_bound(const PivotNode& node, const QueryState& qs, BoundVariant variant) {
  return compute_bound(node.min_proj_sq, node.max_proj_sq, qs.proj_norm_sq, variant);
}

/// Appends the query's coordinate on the direction added by `node`'s pivot.
QueryState query_descend_update(const QueryState& qs, const PivotNode& node,
                                const SparseVector& pivot, const SparseVector& q);

/**
 * Top-k by inner product over a pivot tree. `docs` are the vectors the tree was built from.
 * With the safe bound at gamma = 1 the result equals `brute_force_topk`.
 * Throws DimensionMismatch, or InvalidArgument for k = 0, a non-unit query, or a bad variant.
 * When `trace` is given every bound decision is appended to it.
 */
SearchResult search_tree(const PivotTree& tree, std::span<const SparseVector> docs,
                         const SparseVector& q, std::size_t k, BoundVariant variant,
                         std::vector<BoundDecision>* trace = nullptr);

/// Throws InvalidArgument unless |q| = 1 within 1e-6.
void require_unit(const SparseVector& q);

}  // namespace pivotree
