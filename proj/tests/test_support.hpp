// Generators and independent dense oracles shared by the test suites.
#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pivotree/sparse_vector.hpp"

namespace pivotree {

inline void PrintTo(const SparseVector& v, std::ostream* os) {
  *os << "dim " << v.dim() << " {";
  for (std::size_t i = 0; i < v.nnz(); ++i)
    *os << (i ? " " : "") << v.indices()[i] << ':' << v.weights()[i];
  *os << '}';
}

}  // namespace pivotree

namespace pivotree::testing {

inline SparseVector axis(std::size_t i, std::size_t dim, double w = 1.0) {
  return SparseVector(dim, {static_cast<TermIndex>(i)}, {w});
}

inline SparseVector random_sparse(std::mt19937_64& rng, std::size_t dim, std::size_t nnz,
                                  bool nonnegative = false) {
  std::uniform_int_distribution<std::size_t> pick(0, dim - 1);
  std::uniform_real_distribution<double> weight(nonnegative ? 0.05 : -1.0, 1.0);
  std::vector<std::pair<TermIndex, double>> entries;
  for (std::size_t i = 0; i < nnz; ++i) {
    double w = weight(rng);
    if (w == 0.0) w = 0.5;
    entries.emplace_back(static_cast<TermIndex>(pick(rng)), w);
  }
  auto v = SparseVector::from_entries(dim, std::move(entries));
  if (v.empty()) return axis(pick(rng), dim);
  return v;
}

inline SparseVector random_unit(std::mt19937_64& rng, std::size_t dim, std::size_t nnz,
                                bool nonnegative = false) {
  return normalize(random_sparse(rng, dim, nnz, nonnegative));
}

inline Eigen::VectorXd to_dense(const SparseVector& v) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(v.dim()));
  for (std::size_t i = 0; i < v.nnz(); ++i)
    out(static_cast<Eigen::Index>(v.indices()[i])) = v.weights()[i];
  return out;
}

/// Modified Gram-Schmidt with one re-orthogonalization pass over dense columns. Knows
/// nothing about the P A factorization it is used to check.
class DenseGramSchmidt {
 public:
  explicit DenseGramSchmidt(std::size_t dim) : dim_(dim) {}

  /// Returns the squared residual of p before appending its normalized residual.
  double append(const SparseVector& p) {
    Eigen::VectorXd y = to_dense(p);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : columns_) y -= q.dot(y) * q;
    const double r2 = y.squaredNorm();
    columns_.push_back(y / std::sqrt(r2));
    return r2;
  }

  double residual_sq(const SparseVector& p) const {
    Eigen::VectorXd y = to_dense(p);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : columns_) y -= q.dot(y) * q;
    return y.squaredNorm();
  }

  double proj_sq(const SparseVector& d) const {
    const Eigen::VectorXd x = to_dense(d);
    double s = 0.0;
    for (const auto& q : columns_) {
      const double c = q.dot(x);
      s += c * c;
    }
    return s;
  }

  std::size_t depth() const { return columns_.size(); }
  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_;
  std::vector<Eigen::VectorXd> columns_;
};

inline double max_abs_offdiag_identity(const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd g = b.transpose() * b;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace pivotree::testing
