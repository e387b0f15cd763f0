#include "pivotree/topk.hpp"

#include <algorithm>
#include <limits>

#include "pivotree/errors.hpp"

namespace pivotree {

TopKQueue::TopKQueue(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidArgument("k must be at least 1");
  items_.reserve(std::min<std::size_t>(capacity, 1024));
}

bool TopKQueue::push(std::size_t doc, double similarity) {
  const auto better = [](const Hit& a, const Hit& b) {
    return a.similarity > b.similarity || (a.similarity == b.similarity && a.doc < b.doc);
  };
  const Hit hit{doc, similarity};
  if (full() && !better(hit, items_.back())) return false;
  items_.insert(std::upper_bound(items_.begin(), items_.end(), hit, better), hit);
  if (items_.size() > capacity_) items_.pop_back();
  return true;
}

double TopKQueue::kth_value() const noexcept {
  return full() ? items_.back().similarity : -std::numeric_limits<double>::infinity();
}

}  // namespace pivotree
