#pragma once

#include <utility>
#include <vector>

#include "pivotree/topk.hpp"

namespace pivotree::detail {

/**
 * Depth-first branch and bound shared by the pivot tree and the ball tree.
 *
 * `Tree` provides: `State`, `is_leaf(n)`, `leaf_docs(n)`, `children(n)`, `subtree_size(n)`,
 * `descend(state, n)` (state for bounding n's children), `bound(child, state)` and
 * `score(doc)`. Both children are bounded, the higher one is visited first, and each is
 * skipped only if its bound is strictly below the k-th best similarity at that moment.
 */
template <class Tree>
class BranchAndBound {
 public:
  BranchAndBound(const Tree& tree, TopKQueue& queue, SearchStats& stats,
                 std::vector<BoundDecision>* trace)
      : tree_(tree), queue_(queue), stats_(stats), trace_(trace) {}

  void visit(std::size_t node, const typename Tree::State& state) {
    ++stats_.visited_nodes;
    if (tree_.is_leaf(node)) {
      for (std::size_t doc : tree_.leaf_docs(node)) {
        queue_.push(doc, tree_.score(doc));
        ++stats_.scored;
      }
      return;
    }
    const auto child_state = tree_.descend(state, node);
    auto [first, second] = tree_.children(node);
    double first_bound = tree_.bound(first, child_state);
    double second_bound = tree_.bound(second, child_state);
    if (second_bound > first_bound) {
      std::swap(first, second);
      std::swap(first_bound, second_bound);
    }
    visit_or_prune(first, first_bound, child_state);
    visit_or_prune(second, second_bound, child_state);
  }

 private:
  void visit_or_prune(std::size_t child, double bound, const typename Tree::State& state) {
    const double kth = queue_.kth_value();
    const bool pruned = bound < kth;
    if (trace_ != nullptr) trace_->push_back(BoundDecision{child, bound, kth, pruned});
    if (pruned) {
      stats_.pruned_docs += tree_.subtree_size(child);
      ++stats_.pruned_nodes;
      return;
    }
    visit(child, state);
  }

  const Tree& tree_;
  TopKQueue& queue_;
  SearchStats& stats_;
  std::vector<BoundDecision>* trace_;
};

}  // namespace pivotree::detail
