#include "pivotree/brute_force.hpp"

#include "pivotree/errors.hpp"

namespace pivotree {

std::vector<Hit> brute_force_topk(std::span<const SparseVector> docs, const SparseVector& q,
                                  std::size_t k) {
  TopKQueue queue(k);
  for (std::size_t i = 0; i < docs.size(); ++i) queue.push(i, dot(q, docs[i]));
  return std::move(queue).release();
}

}  // namespace pivotree
