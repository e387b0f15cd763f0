#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pivotree/basis.hpp"
#include "pivotree/sparse_vector.hpp"

namespace pivotree {

class Corpus;

/// How candidate pivots are scored during construction.
enum class PivotScore : std::uint8_t {
  /// Sum over the node's documents of their squared coordinate on the candidate's
  /// orthogonalized direction (the increase of the projected trace).
  trace_gain = 0,
  /// Sum of (p^T d)^2 / ||p||^2, ignoring the current basis.
  raw_projection = 1,
};

struct BuildConfig {
  std::size_t leaf_capacity = 32;
  std::size_t candidate_count = 10;
  std::uint64_t rng_seed = 0;
  std::size_t max_depth = 64;
  PivotScore score = PivotScore::trace_gain;

  /// Throws InvalidArgument on a zero capacity, count or depth.
  void validate() const;
};

/**
 * @brief One node of a pivot tree.
 *
 * `min_proj_sq`/`max_proj_sq` bound ||B^T d||^2 over the subtree's documents, where B is the
 * basis of the pivots of this node's ancestors (empty at the root). An internal node's own
 * pivot extends that basis for its children.
 */
struct PivotNode {
  double min_proj_sq = 0.0;
  double max_proj_sq = 0.0;
  std::size_t subtree_size = 0;

  // Internal nodes.
  std::size_t pivot_doc = 0;
  ExtensionRecord ext;
  double split_threshold = 0.0;
  std::size_t left = 0;   ///< documents with squared new coordinate > split_threshold
  std::size_t right = 0;  ///< the rest

  // Leaves (empty for internal nodes).
  std::vector<std::size_t> docs;
  bool leaf = true;

  bool is_leaf() const noexcept { return leaf; }
};

/// Nodes in pre-order; nodes[0] is the root. Document references index the corpus.
struct PivotTree {
  std::size_t dim = 0;
  std::size_t num_docs = 0;
  BuildConfig config;
  std::vector<PivotNode> nodes;

  const PivotNode& root() const { return nodes.front(); }
  /// Depth of the deepest node (root = 0).
  std::size_t height() const;
};

/// A document taking part in a build, with its projection state on the current path.
struct WorkingDoc {
  std::size_t doc = 0;
  ProjState proj;
};

using BuildRng = std::mt19937_64;

/// Positions of min(count, n) distinct elements of [0, n) drawn by partial Fisher-Yates with
/// `rng() % m`, which keeps the draw identical across standard libraries.
std::vector<std::size_t> sample_candidates(std::size_t n, std::size_t count, BuildRng& rng);

/**
 * Samples min(candidate_count, |docs|) distinct documents and returns the corpus index of
 * the best scoring one; equal scores go to the lower document index. Candidates inside the
 * span of `basis` are skipped. Throws DegeneratePivot if every candidate is.
 */
std::size_t select_pivot(std::span<const WorkingDoc> docs, std::span<const SparseVector> vectors,
                         const Basis& basis, const BuildConfig& cfg, BuildRng& rng);

/// Score of one candidate under `cfg.score` (see PivotScore).
double pivot_score(std::span<const WorkingDoc> docs, std::span<const SparseVector> vectors,
                   const Basis& basis, const SparseVector& candidate, PivotScore score);

/// Appends each document's coordinate on the direction added by `rec`.
void update_projections(std::span<WorkingDoc> docs, std::span<const SparseVector> vectors,
                        const ExtensionRecord& rec, const SparseVector& pivot);

struct Split {
  std::size_t high_count = 0;  ///< docs[0, high_count) have squared last coordinate > threshold
  double threshold = 0.0;
};

/**
 * Stable-partitions `docs` by the square of their newest coordinate around its median
 * (mean of the two middle values for an even count). If the median equals the maximum,
 * the threshold drops to the largest smaller value so both sides are non-empty.
 * Throws UnsplittableNode when all values are identical or fewer than two docs are given.
 */
Split make_split(std::span<WorkingDoc> docs);

PivotTree build_tree(std::span<const SparseVector> vectors, const BuildConfig& cfg);
PivotTree build_tree(const Corpus& corpus, const BuildConfig& cfg);

}  // namespace pivotree
