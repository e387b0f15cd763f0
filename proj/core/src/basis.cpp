#include "pivotree/basis.hpp"

#include <cmath>
#include <string>

#include "pivotree/errors.hpp"

namespace pivotree {

Basis::Basis(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InvalidArgument("basis dimension must be positive");
}

double Basis::coeff(std::size_t row, std::size_t col) const {
  const auto& column = columns_.at(col);
  return row < column.size() ? column[row] : 0.0;
}

std::vector<double> Basis::pivot_dots(const SparseVector& v) const {
  if (v.dim() != dim_) throw DimensionMismatch(dim_, v.dim());
  std::vector<double> out;
  out.reserve(pivots_.size());
  for (const auto& p : pivots_) out.push_back(dot(*p, v));
  return out;
}

std::vector<double> Basis::coords(std::span<const double> pivot_dots) const {
  if (pivot_dots.size() != depth()) throw DimensionMismatch(depth(), pivot_dots.size());
  std::vector<double> out(depth(), 0.0);
  for (std::size_t j = 0; j < depth(); ++j) {
    const auto& column = columns_[j];
    double sum = 0.0;
    for (std::size_t i = 0; i <= j; ++i) sum += column[i] * pivot_dots[i];
    out[j] = sum;
  }
  return out;
}

double Basis::residual_norm_sq(const SparseVector& p, std::span<const double> pivot_dots) const {
  double in_span = 0.0;
  for (double c : coords(pivot_dots)) in_span += c * c;
  const double residual = norm_sq(p) - in_span;
  if (residual < -kDriftTolerance)
    throw NumericalDrift("negative residual norm " + std::to_string(residual));
  return residual < 0.0 ? 0.0 : residual;
}

ExtensionRecord Basis::prepare(const SparseVector& p) const {
  ExtensionRecord rec;
  rec.pivot_dots = pivot_dots(p);
  const auto g = coords(rec.pivot_dots);
  double in_span = 0.0;
  for (double c : g) in_span += c * c;
  const double residual = norm_sq(p) - in_span;
  if (residual < -kDriftTolerance)
    throw NumericalDrift("negative residual norm " + std::to_string(residual));
  if (residual <= kSpanEpsilon)
    throw DegeneratePivot("pivot lies in the span of the basis (residual " +
                          std::to_string(residual) + ")");
  rec.alpha = 1.0 / std::sqrt(residual);

  // w = A g, A upper triangular.
  rec.w.assign(depth(), 0.0);
  for (std::size_t j = 0; j < depth(); ++j) {
    const auto& column = columns_[j];
    for (std::size_t i = 0; i <= j; ++i) rec.w[i] += column[i] * g[j];
  }
  return rec;
}

std::pair<Basis, ExtensionRecord> Basis::extend(const SparseVector& p) const {
  ExtensionRecord rec = prepare(p);
  Basis next = *this;
  next.pivots_.push_back(std::make_shared<const SparseVector>(p));
  std::vector<double> column;
  column.reserve(depth() + 1);
  for (double wi : rec.w) column.push_back(-rec.alpha * wi);
  column.push_back(rec.alpha);
  next.columns_.push_back(std::move(column));
  return {std::move(next), std::move(rec)};
}

Eigen::MatrixXd Basis::materialize() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_),
                                              static_cast<Eigen::Index>(depth()));
  for (std::size_t j = 0; j < depth(); ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const double a = columns_[j][i];
      const auto idx = pivots_[i]->indices();
      const auto w = pivots_[i]->weights();
      for (std::size_t e = 0; e < idx.size(); ++e)
        out(static_cast<Eigen::Index>(idx[e]), static_cast<Eigen::Index>(j)) += a * w[e];
    }
  }
  return out;
}

double new_coordinate(std::span<const double> old_pivot_dots, double dot_with_pivot,
                      const ExtensionRecord& rec) {
  if (old_pivot_dots.size() != rec.w.size())
    throw DimensionMismatch(rec.w.size(), old_pivot_dots.size());
  double in_span = 0.0;
  for (std::size_t i = 0; i < rec.w.size(); ++i) in_span += old_pivot_dots[i] * rec.w[i];
  return rec.alpha * (dot_with_pivot - in_span);
}

void apply_extension(ProjState& state, const SparseVector& d, const ExtensionRecord& rec,
                     const SparseVector& p) {
  const double dp = dot(d, p);
  const double c = new_coordinate(state.pivot_dots, dp, rec);
  state.coords.push_back(c);
  state.pivot_dots.push_back(dp);
  state.proj_norm_sq += c * c;
}

ProjState update_proj(const ProjState& state, const SparseVector& d, const ExtensionRecord& rec,
                      const SparseVector& p) {
  ProjState next = state;
  apply_extension(next, d, rec, p);
  return next;
}

}  // namespace pivotree
