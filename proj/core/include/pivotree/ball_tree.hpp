#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pivotree/sparse_vector.hpp"
#include "pivotree/topk.hpp"

namespace pivotree {

class Corpus;

/// A ball of documents: mean vector and the largest distance from it to a member.
struct BallNode {
  explicit BallNode(SparseVector c) : centroid(std::move(c)) {}

  SparseVector centroid;
  double radius = 0.0;
  std::size_t subtree_size = 0;
  std::size_t left = 0;
  std::size_t right = 0;
  std::vector<std::size_t> docs;  ///< leaves only
  bool leaf = true;

  bool is_leaf() const noexcept { return leaf; }
};

/// Maximum inner product ball tree; nodes in pre-order, nodes[0] is the root.
struct BallTree {
  std::size_t dim = 0;
  std::size_t num_docs = 0;
  std::size_t leaf_capacity = 32;
  std::uint64_t seed = 0;
  std::vector<BallNode> nodes;

  const BallNode& root() const { return nodes.front(); }
};

/// Above this dimension centroids are accumulated in a sparse map instead of a dense buffer.
inline constexpr std::size_t kDenseCentroidMaxDim = std::size_t{1} << 16;

/**
 * Recursive two-anchor split: the member farthest from the mean, then the member farthest
 * from it; each member joins the nearer anchor (the first on ties). Nodes of at most
 * `leaf_capacity` documents, or whose members all coincide, become leaves.
 *
 * The construction is deterministic; `seed` is recorded in the tree for provenance only.
 */
BallTree build_ball_tree(std::span<const SparseVector> docs, std::size_t leaf_capacity,
                         std::uint64_t seed);
BallTree build_ball_tree(const Corpus& corpus, std::size_t leaf_capacity, std::uint64_t seed);

/// q^T centroid + radius, an upper bound on q^T d over the ball for unit q.
double mip_bound(const BallNode& node, const SparseVector& q);

/// Same traversal and accounting as search_tree, with `gamma * mip_bound` as the node bound.
SearchResult mip_search(const BallTree& tree, std::span<const SparseVector> docs,
                        const SparseVector& q, std::size_t k, double gamma,
                        std::vector<BoundDecision>* trace = nullptr);

}  // namespace pivotree
