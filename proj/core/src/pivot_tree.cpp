#include "pivotree/pivot_tree.hpp"

#include <algorithm>
#include <limits>

#include "pivotree/corpus.hpp"
#include "pivotree/errors.hpp"

namespace pivotree {

void BuildConfig::validate() const {
  if (leaf_capacity == 0) throw InvalidArgument("leaf capacity must be at least 1");
  if (candidate_count == 0) throw InvalidArgument("candidate count must be at least 1");
  if (max_depth == 0) throw InvalidArgument("max depth must be at least 1");
  if (score != PivotScore::trace_gain && score != PivotScore::raw_projection)
    throw InvalidArgument("unknown pivot score");
}

std::size_t PivotTree::height() const {
  if (nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [n, depth] = stack.back();
    stack.pop_back();
    best = std::max(best, depth);
    if (!nodes[n].is_leaf()) {
      stack.emplace_back(nodes[n].left, depth + 1);
      stack.emplace_back(nodes[n].right, depth + 1);
    }
  }
  return best;
}

double pivot_score(std::span<const WorkingDoc> docs, std::span<const SparseVector> vectors,
                   const Basis& basis, const SparseVector& candidate, PivotScore score) {
  double total = 0.0;
  if (score == PivotScore::raw_projection) {
    const double n2 = norm_sq(candidate);
    for (const auto& wd : docs) {
      const double pd = dot(candidate, vectors[wd.doc]);
      total += pd * pd;
    }
    return total / n2;
  }
  const ExtensionRecord rec = basis.prepare(candidate);
  for (const auto& wd : docs) {
    const double c = new_coordinate(wd.proj.pivot_dots, dot(candidate, vectors[wd.doc]), rec);
    total += c * c;
  }
  return total;
}

std::vector<std::size_t> sample_candidates(std::size_t n, std::size_t count, BuildRng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  const std::size_t m = std::min(count, n);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(order[i], order[j]);
  }
  order.resize(m);
  return order;
}

std::size_t select_pivot(std::span<const WorkingDoc> docs, std::span<const SparseVector> vectors,
                         const Basis& basis, const BuildConfig& cfg, BuildRng& rng) {
  if (docs.empty()) throw InvalidArgument("cannot select a pivot from an empty node");

  const auto candidates = sample_candidates(docs.size(), cfg.candidate_count, rng);

  std::size_t best_doc = std::numeric_limits<std::size_t>::max();
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t pos : candidates) {
    const std::size_t doc = docs[pos].doc;
    const SparseVector& p = vectors[doc];
    double s;
    try {
      // The raw score ignores the basis, but the pivot must still extend it.
      if (cfg.score == PivotScore::raw_projection) (void)basis.prepare(p);
      s = pivot_score(docs, vectors, basis, p, cfg.score);
    } catch (const DegeneratePivot&) {
      continue;
    }
    if (s > best_score || (s == best_score && doc < best_doc)) {
      best_score = s;
      best_doc = doc;
    }
  }
  if (best_doc == std::numeric_limits<std::size_t>::max())
    throw DegeneratePivot("all sampled pivot candidates lie in the span of the path basis");
  return best_doc;
}

void update_projections(std::span<WorkingDoc> docs, std::span<const SparseVector> vectors,
                        const ExtensionRecord& rec, const SparseVector& pivot) {
  for (auto& wd : docs) apply_extension(wd.proj, vectors[wd.doc], rec, pivot);
}

Split make_split(std::span<WorkingDoc> docs) {
  if (docs.size() < 2) throw UnsplittableNode("a split needs at least two documents");
  std::vector<double> sq;
  sq.reserve(docs.size());
  for (const auto& wd : docs) {
    if (wd.proj.coords.empty()) throw InvalidArgument("documents carry no split coordinate");
    const double c = wd.proj.coords.back();
    sq.push_back(c * c);
  }
  std::vector<double> sorted = sq;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back())
    throw UnsplittableNode("all documents share the same split coordinate");

  const std::size_t n = sorted.size();
  double threshold = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  if (!(threshold < sorted.back())) {
    auto below = std::lower_bound(sorted.begin(), sorted.end(), sorted.back());
    threshold = *(below - 1);
  }

  auto mid = std::stable_partition(docs.begin(), docs.end(), [threshold](const WorkingDoc& wd) {
    const double c = wd.proj.coords.back();
    return c * c > threshold;
  });
  return Split{static_cast<std::size_t>(mid - docs.begin()), threshold};
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(std::span<const SparseVector> vectors, const BuildConfig& cfg, PivotTree& tree)
      : vectors_(vectors), cfg_(cfg), tree_(tree), rng_(cfg.rng_seed) {}

  std::size_t build(std::span<WorkingDoc> docs, const Basis& basis, std::size_t depth) {
    const std::size_t id = tree_.nodes.size();
    tree_.nodes.emplace_back();
    {
      PivotNode& node = tree_.nodes[id];
      node.subtree_size = docs.size();
      node.min_proj_sq = std::numeric_limits<double>::infinity();
      node.max_proj_sq = -std::numeric_limits<double>::infinity();
      for (const auto& wd : docs) {
        node.min_proj_sq = std::min(node.min_proj_sq, wd.proj.proj_norm_sq);
        node.max_proj_sq = std::max(node.max_proj_sq, wd.proj.proj_norm_sq);
      }
    }
    if (docs.size() <= cfg_.leaf_capacity || depth >= cfg_.max_depth) return make_leaf(id, docs);

    std::size_t pivot_doc;
    try {
      pivot_doc = select_pivot(docs, vectors_, basis, cfg_, rng_);
    } catch (const DegeneratePivot&) {
      return make_leaf(id, docs);
    }
    const SparseVector& pivot = vectors_[pivot_doc];
    auto [child_basis, rec] = basis.extend(pivot);
    update_projections(docs, vectors_, rec, pivot);

    Split split;
    try {
      split = make_split(docs);
    } catch (const UnsplittableNode&) {
      return make_leaf(id, docs);
    }

    {
      PivotNode& node = tree_.nodes[id];
      node.leaf = false;
      node.pivot_doc = pivot_doc;
      node.ext = std::move(rec);
      node.split_threshold = split.threshold;
    }
    const std::size_t left = build(docs.first(split.high_count), child_basis, depth + 1);
    const std::size_t right = build(docs.subspan(split.high_count), child_basis, depth + 1);
    tree_.nodes[id].left = left;
    tree_.nodes[id].right = right;
    return id;
  }

 private:
  std::size_t make_leaf(std::size_t id, std::span<const WorkingDoc> docs) {
    PivotNode& node = tree_.nodes[id];
    node.leaf = true;
    node.docs.reserve(docs.size());
    for (const auto& wd : docs) node.docs.push_back(wd.doc);
    return id;
  }

  std::span<const SparseVector> vectors_;
  const BuildConfig& cfg_;
  PivotTree& tree_;
  BuildRng rng_;
};

}  // namespace

PivotTree build_tree(std::span<const SparseVector> vectors, const BuildConfig& cfg) {
  cfg.validate();
  if (vectors.empty()) throw InvalidArgument("cannot index an empty corpus");
  PivotTree tree;
  tree.dim = vectors.front().dim();
  tree.num_docs = vectors.size();
  tree.config = cfg;
  std::vector<WorkingDoc> docs(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].dim() != tree.dim) throw DimensionMismatch(tree.dim, vectors[i].dim());
    docs[i].doc = i;
  }
  TreeBuilder builder(vectors, cfg, tree);
  builder.build(docs, Basis(tree.dim), 0);
  return tree;
}

PivotTree build_tree(const Corpus& corpus, const BuildConfig& cfg) {
  return build_tree(corpus.vectors(), cfg);
}

}  // namespace pivotree
