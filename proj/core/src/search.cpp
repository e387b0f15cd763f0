#include "pivotree/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pivotree/errors.hpp"
#include "pivotree/traversal.hpp"

namespace pivotree {

void BoundVariant::validate() const {
  if (kind != BoundKind::safe && kind != BoundKind::heuristic)
    throw InvalidArgument("unknown bound variant");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw InvalidArgument("gamma must lie in (0, 1], got " + std::to_string(gamma));
}

namespace {

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double compute_bound(double min_proj_sq, double max_proj_sq, double query_proj_sq,
                     BoundVariant variant) {
  const double a = std::sqrt(clamp_unit(query_proj_sq));
  const double hi = std::sqrt(clamp_unit(max_proj_sq));
  double bound;
  if (variant.kind == BoundKind::safe) {
    const double q_perp = std::sqrt(clamp_unit(1.0 - query_proj_sq));
    const double d_perp = std::sqrt(clamp_unit(1.0 - min_proj_sq));
    bound = a * hi + q_perp * d_perp;
  } else {
    const double lo = std::sqrt(clamp_unit(min_proj_sq));
    bound = 1.0 + 2.0 * a * hi - a - lo;
  }
  return variant.gamma * bound;
}

QueryState query_descend_update(const QueryState& qs, const PivotNode& node,
                                const SparseVector& pivot, const SparseVector& q) {
  QueryState next = qs;
  const double qp = dot(q, pivot);
  const double c = new_coordinate(qs.pivot_dots, qp, node.ext);
  next.pivot_dots.push_back(qp);
  next.coords.push_back(c);
  next.proj_norm_sq += c * c;
  return next;
}

void require_unit(const SparseVector& q) {
  const double n2 = norm_sq(q);
  if (std::abs(n2 - 1.0) > 1e-6)
    throw InvalidArgument("query must be unit-norm (squared norm " + std::to_string(n2) + ")");
}

namespace {

class PivotTreeView {
 public:
  using State = QueryState;

  PivotTreeView(const PivotTree& tree, std::span<const SparseVector> docs, const SparseVector& q,
                BoundVariant variant)
      : tree_(tree), docs_(docs), q_(q), variant_(variant) {}

  bool is_leaf(std::size_t n) const { return tree_.nodes[n].is_leaf(); }
  const std::vector<std::size_t>& leaf_docs(std::size_t n) const { return tree_.nodes[n].docs; }
  std::pair<std::size_t, std::size_t> children(std::size_t n) const {
    return {tree_.nodes[n].left, tree_.nodes[n].right};
  }
  std::size_t subtree_size(std::size_t n) const { return tree_.nodes[n].subtree_size; }
  State descend(const State& s, std::size_t n) const {
    const PivotNode& node = tree_.nodes[n];
    return query_descend_update(s, node, docs_[node.pivot_doc], q_);
  }
  double bound(std::size_t child, const State& s) const {
    return compute_bound(tree_.nodes[child], s, variant_);
  }
  double score(std::size_t doc) const { return dot(q_, docs_[doc]); }

 private:
  const PivotTree& tree_;
  std::span<const SparseVector> docs_;
  const SparseVector& q_;
  BoundVariant variant_;
};

}  // namespace

SearchResult search_tree(const PivotTree& tree, std::span<const SparseVector> docs,
                         const SparseVector& q, std::size_t k, BoundVariant variant,
                         std::vector<BoundDecision>* trace) {
  variant.validate();
  if (k == 0) throw InvalidArgument("k must be at least 1");
  if (tree.nodes.empty()) throw InvalidArgument("search on an empty tree");
  if (q.dim() != tree.dim) throw DimensionMismatch(tree.dim, q.dim());
  if (docs.size() != tree.num_docs) throw DimensionMismatch(tree.num_docs, docs.size());
  require_unit(q);

  TopKQueue queue(k);
  SearchResult result;
  PivotTreeView view(tree, docs, q, variant);
  detail::BranchAndBound<PivotTreeView> bnb(view, queue, result.stats, trace);
  bnb.visit(0, QueryState{});
  result.hits = std::move(queue).release();
  return result;
}

}  // namespace pivotree
