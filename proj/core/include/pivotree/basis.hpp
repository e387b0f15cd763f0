#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pivotree/sparse_vector.hpp"

namespace pivotree {

/// Residuals (squared) at or below this are treated as "pivot already in span".
inline constexpr double kSpanEpsilon = 1e-7;
/// Negative residuals down to -kDriftTolerance are rounding and clamp to 0.
inline constexpr double kDriftTolerance = 1e-9;

/**
 * @brief Everything needed to project a vector onto the direction a pivot adds to a basis.
 *
 * With pivots P (columns p_1..p_n), coefficients A and B = P A orthonormal, appending p gives
 * the unit direction x = alpha (p - P w), where w = A A^T P^T p. The direction itself is never
 * formed: for any d, x^T d = alpha (d^T p - (P^T d)^T w).
 */
struct ExtensionRecord {
  double alpha = 0.0;
  std::vector<double> w;
  std::vector<double> pivot_dots;  ///< P^T p
};

/// Per-vector state along a pivot path: coordinates in B and the raw pivot dots P^T d.
struct ProjState {
  std::vector<double> coords;
  std::vector<double> pivot_dots;
  double proj_norm_sq = 0.0;

  std::size_t depth() const noexcept { return coords.size(); }
};

/**
 * @brief Orthonormal basis B = P A of the span of a sequence of sparse pivots.
 *
 * A is upper triangular with a positive diagonal; column j is stored as its j+1 leading
 * entries. Values are immutable: `extend` returns a new basis sharing the pivot prefix.
 */
class Basis {
 public:
  explicit Basis(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t depth() const noexcept { return pivots_.size(); }
  const SparseVector& pivot(std::size_t i) const { return *pivots_.at(i); }

  /// Entry A(row, col); zero below the diagonal.
  double coeff(std::size_t row, std::size_t col) const;

  /// P^T v.
  std::vector<double> pivot_dots(const SparseVector& v) const;

  /// B^T v given P^T v, i.e. A^T pivot_dots.
  std::vector<double> coords(std::span<const double> pivot_dots) const;

  /// ||p||^2 - ||B^T p||^2, clamped to 0 within kDriftTolerance. Throws NumericalDrift below.
  double residual_norm_sq(const SparseVector& p, std::span<const double> pivot_dots) const;

  /// The record `extend(p)` would produce, without building the new basis.
  /// Throws DegeneratePivot when the residual is at most kSpanEpsilon.
  ExtensionRecord prepare(const SparseVector& p) const;

  std::pair<Basis, ExtensionRecord> extend(const SparseVector& p) const;

  /// Dense dim x depth matrix P A. Meant for tests and diagnostics.
  Eigen::MatrixXd materialize() const;

 private:
  std::size_t dim_;
  std::vector<std::shared_ptr<const SparseVector>> pivots_;
  std::vector<std::vector<double>> columns_;
};

inline Basis empty_basis(std::size_t dim) { return Basis(dim); }

/// The coordinate a vector gains on the extension's new direction, from its old pivot dots
/// and its dot with the new pivot.
double new_coordinate(std::span<const double> old_pivot_dots, double dot_with_pivot,
                      const ExtensionRecord& rec);

/// Appends the coordinate of `d` on the direction added by `rec` (pivot `p`).
ProjState update_proj(const ProjState& state, const SparseVector& d, const ExtensionRecord& rec,
                      const SparseVector& p);

/// In-place form of update_proj.
void apply_extension(ProjState& state, const SparseVector& d, const ExtensionRecord& rec,
                     const SparseVector& p);

}  // namespace pivotree
