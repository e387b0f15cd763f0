#include "pivotree/sparse_vector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pivotree/errors.hpp"

namespace pivotree {

SparseVector::SparseVector(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InvalidArgument("sparse vector dimension must be positive");
}

SparseVector::SparseVector(std::size_t dim, std::vector<TermIndex> indices,
                           std::vector<double> weights)
    : dim_(dim), indices_(std::move(indices)), weights_(std::move(weights)) {
  if (dim == 0) throw InvalidArgument("sparse vector dimension must be positive");
  if (indices_.size() != weights_.size())
    throw InvalidArgument("sparse vector index/weight arrays differ in length");
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] >= dim_)
      throw InvalidArgument("term index " + std::to_string(indices_[i]) +
                            " out of range for dim " + std::to_string(dim_));
    if (i > 0 && indices_[i] <= indices_[i - 1])
      throw InvalidArgument("term indices must be strictly increasing");
    if (!std::isfinite(weights_[i]) || weights_[i] == 0.0)
      throw InvalidArgument("weights must be finite and nonzero");
  }
}

SparseVector SparseVector::from_entries(std::size_t dim,
                                        std::vector<std::pair<TermIndex, double>> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  std::vector<TermIndex> indices;
  std::vector<double> weights;
  indices.reserve(entries.size());
  weights.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size();) {
    const TermIndex idx = entries[i].first;
    double sum = 0.0;
    for (; i < entries.size() && entries[i].first == idx; ++i) sum += entries[i].second;
    if (sum != 0.0) {
      indices.push_back(idx);
      weights.push_back(sum);
    }
  }
  return SparseVector(dim, std::move(indices), std::move(weights));
}

double dot(const SparseVector& a, const SparseVector& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
  const auto ai = a.indices();
  const auto bi = b.indices();
  const auto aw = a.weights();
  const auto bw = b.weights();
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ai.size() && j < bi.size()) {
    if (ai[i] < bi[j]) {
      ++i;
    } else if (bi[j] < ai[i]) {
      ++j;
    } else {
      sum += aw[i] * bw[j];
      ++i;
      ++j;
    }
  }
  return sum;
}

double norm_sq(const SparseVector& a) noexcept {
  double sum = 0.0;
  for (double w : a.weights()) sum += w * w;
  return sum;
}

double distance_sq(const SparseVector& a, const SparseVector& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
  const auto ai = a.indices();
  const auto bi = b.indices();
  const auto aw = a.weights();
  const auto bw = b.weights();
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ai.size() || j < bi.size()) {
    double diff;
    if (j == bi.size() || (i < ai.size() && ai[i] < bi[j])) {
      diff = aw[i++];
    } else if (i == ai.size() || bi[j] < ai[i]) {
      diff = -bw[j++];
    } else {
      diff = aw[i++] - bw[j++];
    }
    sum += diff * diff;
  }
  return sum;
}

SparseVector normalize(const SparseVector& a) {
  const double n2 = norm_sq(a);
  if (!(n2 > 0.0)) throw InvalidArgument("cannot normalize empty document");
  const double scale = 1.0 / std::sqrt(n2);
  std::vector<double> weights(a.weights().begin(), a.weights().end());
  for (double& w : weights) w *= scale;
  return SparseVector(a.dim(), std::vector<TermIndex>(a.indices().begin(), a.indices().end()),
                      std::move(weights));
}

double dot_dense(const SparseVector& a, std::span<const double> dense) {
  if (dense.size() != a.dim()) throw DimensionMismatch(a.dim(), dense.size());
  double sum = 0.0;
  const auto idx = a.indices();
  const auto w = a.weights();
  for (std::size_t i = 0; i < idx.size(); ++i) sum += w[i] * dense[idx[i]];
  return sum;
}

}  // namespace pivotree
