#include "pivotree/ball_tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pivotree/corpus.hpp"
#include "pivotree/errors.hpp"
#include "pivotree/search.hpp"
#include "pivotree/traversal.hpp"

namespace pivotree {

namespace {

class BallBuilder {
 public:
  BallBuilder(std::span<const SparseVector> vectors, BallTree& tree)
      : vectors_(vectors), tree_(tree) {
    if (tree.dim <= kDenseCentroidMaxDim) scratch_.assign(tree.dim, 0.0);
  }

  std::size_t build(std::span<std::size_t> docs) {
    SparseVector centroid = mean(docs);
    double radius_sq = 0.0;
    for (std::size_t d : docs) radius_sq = std::max(radius_sq, distance_sq(vectors_[d], centroid));

    const std::size_t id = tree_.nodes.size();
    tree_.nodes.emplace_back(std::move(centroid));
    tree_.nodes[id].radius = std::sqrt(radius_sq);
    tree_.nodes[id].subtree_size = docs.size();

    if (docs.size() <= tree_.leaf_capacity) return make_leaf(id, docs);

    const std::size_t a = farthest(docs, tree_.nodes[id].centroid);
    const std::size_t b = farthest(docs, vectors_[a]);
    if (distance_sq(vectors_[a], vectors_[b]) == 0.0) return make_leaf(id, docs);

    auto mid = std::stable_partition(docs.begin(), docs.end(), [&](std::size_t d) {
      return distance_sq(vectors_[d], vectors_[a]) <= distance_sq(vectors_[d], vectors_[b]);
    });
    const auto split = static_cast<std::size_t>(mid - docs.begin());

    tree_.nodes[id].leaf = false;
    const std::size_t left = build(docs.first(split));
    const std::size_t right = build(docs.subspan(split));
    tree_.nodes[id].left = left;
    tree_.nodes[id].right = right;
    return id;
  }

 private:
  SparseVector mean(std::span<const std::size_t> docs) {
    const double n = static_cast<double>(docs.size());
    std::vector<std::pair<TermIndex, double>> entries;
    if (!scratch_.empty()) {
      std::vector<TermIndex> touched;
      for (std::size_t d : docs) {
        const auto idx = vectors_[d].indices();
        const auto w = vectors_[d].weights();
        for (std::size_t e = 0; e < idx.size(); ++e) {
          if (scratch_[idx[e]] == 0.0) touched.push_back(idx[e]);
          scratch_[idx[e]] += w[e];
        }
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      entries.reserve(touched.size());
      for (TermIndex t : touched) {
        entries.emplace_back(t, scratch_[t] / n);
        scratch_[t] = 0.0;
      }
    } else {
      std::map<TermIndex, double> acc;
      for (std::size_t d : docs) {
        const auto idx = vectors_[d].indices();
        const auto w = vectors_[d].weights();
        for (std::size_t e = 0; e < idx.size(); ++e) acc[idx[e]] += w[e];
      }
      entries.reserve(acc.size());
      for (const auto& [t, sum] : acc) entries.emplace_back(t, sum / n);
    }
    return SparseVector::from_entries(tree_.dim, std::move(entries));
  }

  // Lowest document index wins ties.
  std::size_t farthest(std::span<const std::size_t> docs, const SparseVector& from) const {
    std::size_t best = docs.front();
    double best_dist = -1.0;
    for (std::size_t d : docs) {
      const double dist = distance_sq(vectors_[d], from);
      if (dist > best_dist || (dist == best_dist && d < best)) {
        best_dist = dist;
        best = d;
      }
    }
    return best;
  }

  std::size_t make_leaf(std::size_t id, std::span<const std::size_t> docs) {
    tree_.nodes[id].leaf = true;
    tree_.nodes[id].docs.assign(docs.begin(), docs.end());
    return id;
  }

  std::span<const SparseVector> vectors_;
  BallTree& tree_;
  std::vector<double> scratch_;
};

class BallTreeView {
 public:
  struct State {};

  BallTreeView(const BallTree& tree, std::span<const SparseVector> docs, const SparseVector& q,
               double gamma)
      : tree_(tree), docs_(docs), q_(q), gamma_(gamma) {}

  bool is_leaf(std::size_t n) const { return tree_.nodes[n].is_leaf(); }
  const std::vector<std::size_t>& leaf_docs(std::size_t n) const { return tree_.nodes[n].docs; }
  std::pair<std::size_t, std::size_t> children(std::size_t n) const {
    return {tree_.nodes[n].left, tree_.nodes[n].right};
  }
  std::size_t subtree_size(std::size_t n) const { return tree_.nodes[n].subtree_size; }
  State descend(const State& s, std::size_t) const { return s; }
  double bound(std::size_t child, const State&) const {
    return gamma_ * mip_bound(tree_.nodes[child], q_);
  }
  double score(std::size_t doc) const { return dot(q_, docs_[doc]); }

 private:
  const BallTree& tree_;
  std::span<const SparseVector> docs_;
  const SparseVector& q_;
  double gamma_;
};

}  // namespace

BallTree build_ball_tree(std::span<const SparseVector> docs, std::size_t leaf_capacity,
                         std::uint64_t seed) {
  if (leaf_capacity == 0) throw InvalidArgument("leaf capacity must be at least 1");
  if (docs.empty()) throw InvalidArgument("cannot index an empty corpus");
  BallTree tree;
  tree.dim = docs.front().dim();
  tree.num_docs = docs.size();
  tree.leaf_capacity = leaf_capacity;
  tree.seed = seed;
  std::vector<std::size_t> order(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].dim() != tree.dim) throw DimensionMismatch(tree.dim, docs[i].dim());
    order[i] = i;
  }
  BallBuilder builder(docs, tree);
  builder.build(order);
  return tree;
}

BallTree build_ball_tree(const Corpus& corpus, std::size_t leaf_capacity, std::uint64_t seed) {
  return build_ball_tree(corpus.vectors(), leaf_capacity, seed);
}

double mip_bound(const BallNode& node, const SparseVector& q) {
  return dot(q, node.centroid) + node.radius;
}

SearchResult mip_search(const BallTree& tree, std::span<const SparseVector> docs,
                        const SparseVector& q, std::size_t k, double gamma,
                        std::vector<BoundDecision>* trace) {
  BoundVariant{BoundKind::safe, gamma}.validate();
  if (k == 0) throw InvalidArgument("k must be at least 1");
  if (tree.nodes.empty()) throw InvalidArgument("search on an empty tree");
  if (q.dim() != tree.dim) throw DimensionMismatch(tree.dim, q.dim());
  if (docs.size() != tree.num_docs) throw DimensionMismatch(tree.num_docs, docs.size());
  require_unit(q);

  TopKQueue queue(k);
  SearchResult result;
  BallTreeView view(tree, docs, q, gamma);
  detail::BranchAndBound<BallTreeView> bnb(view, queue, result.stats, trace);
  bnb.visit(0, BallTreeView::State{});
  result.hits = std::move(queue).release();
  return result;
}

}  // namespace pivotree
