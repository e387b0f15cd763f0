#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace pivotree {

using TermIndex = std::uint32_t;

/**
 * @brief A vector in term space, stored as parallel arrays of strictly
 * increasing term indices and their (finite, nonzero) weights.
 *
 * The constructor validates the representation; use `from_entries` when the
 * input may be unsorted, contain duplicates, or contain zeros.
 */
class SparseVector {
 public:
  /// The zero vector of dimension `dim`.
  explicit SparseVector(std::size_t dim);

  SparseVector(std::size_t dim, std::vector<TermIndex> indices, std::vector<double> weights);

  /// Sorts by index, sums duplicate indices and drops zero weights.
  static SparseVector from_entries(std::size_t dim,
                                   std::vector<std::pair<TermIndex, double>> entries);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }

  std::span<const TermIndex> indices() const noexcept { return indices_; }
  std::span<const double> weights() const noexcept { return weights_; }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::size_t dim_;
  std::vector<TermIndex> indices_;
  std::vector<double> weights_;
};

/// Inner product by merge over the sorted supports. Throws DimensionMismatch.
double dot(const SparseVector& a, const SparseVector& b);

double norm_sq(const SparseVector& a) noexcept;

/// Squared Euclidean distance, computed entrywise so identical inputs give exactly 0.
double distance_sq(const SparseVector& a, const SparseVector& b);

/// Scales to unit L2 norm. Throws InvalidArgument on the zero vector.
SparseVector normalize(const SparseVector& a);

/// Inner product against a dense vector of length a.dim().
double dot_dense(const SparseVector& a, std::span<const double> dense);

}  // namespace pivotree
