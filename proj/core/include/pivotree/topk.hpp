#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace pivotree {

struct Hit {
  std::size_t doc = 0;
  double similarity = 0.0;

  friend bool operator==(const Hit&, const Hit&) = default;
};

/// Bounded set of the k best hits seen so far: higher similarity first, then lower doc index.
class TopKQueue {
 public:
  explicit TopKQueue(std::size_t capacity);

  /// Returns true if the hit was kept.
  bool push(std::size_t doc, double similarity);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool full() const noexcept { return items_.size() == capacity_; }

  /// Similarity of the last kept hit when full, -infinity otherwise.
  double kth_value() const noexcept;

  const std::vector<Hit>& items() const noexcept { return items_; }
  std::vector<Hit> release() && { return std::move(items_); }

 private:
  std::size_t capacity_;
  std::vector<Hit> items_;
};

struct SearchStats {
  std::size_t scored = 0;       ///< documents scored exactly at leaves
  std::size_t pruned_docs = 0;  ///< documents inside skipped subtrees
  std::size_t visited_nodes = 0;
  std::size_t pruned_nodes = 0;
};

struct SearchResult {
  std::vector<Hit> hits;
  SearchStats stats;
};

/// One child-visit decision of a branch-and-bound traversal.
struct BoundDecision {
  std::size_t node = 0;
  double bound = 0.0;
  double kth = 0.0;
  bool pruned = false;
};

}  // namespace pivotree
