#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pivotree/sparse_vector.hpp"
#include "pivotree/topk.hpp"

namespace pivotree {

/// Exact top-k by q^T d over every document; ties go to the lower document index.
std::vector<Hit> brute_force_topk(std::span<const SparseVector> docs, const SparseVector& q,
                                  std::size_t k);

}  // namespace pivotree
