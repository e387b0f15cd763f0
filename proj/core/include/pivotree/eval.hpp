#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pivotree/pivot_tree.hpp"
#include "pivotree/search.hpp"

namespace pivotree {

class Corpus;

enum class Method : std::uint8_t { mta_safe, mta_heuristic, mip };

/// "MTA-safe", "MTA-heuristic" or "MIP".
std::string_view method_name(Method m) noexcept;
/// Inverse of method_name; throws InvalidArgument.
Method parse_method(std::string_view name);

/// |retrieved ∩ truth| / |truth|. Throws InvalidArgument on an empty truth list.
double precision_at_k(std::span<const std::size_t> retrieved, std::span<const std::size_t> truth);

/**
 * Spearman footrule over the truth list: sum of |rank_retrieved(i) - rank_truth(i)| with
 * 1-based ranks, where a truth id absent from `retrieved` gets rank k + 1 (k = |truth|).
 * Throws InvalidArgument on an empty truth list or duplicate ids.
 */
double spearman_distance(std::span<const std::size_t> retrieved,
                         std::span<const std::size_t> truth);

struct SweepConfig {
  std::size_t k = 10;
  std::vector<double> gammas{1.0};  ///< each in (0, 1], strictly descending
  std::vector<Method> methods{Method::mta_safe, Method::mta_heuristic, Method::mip};
  BuildConfig mta;
  std::size_t ball_leaf_capacity = 32;
  std::uint64_t ball_seed = 0;

  void validate() const;
};

struct EvalRow {
  Method method;
  double gamma;
  std::size_t query;
  double precision;
  double spearman;
  double prune_fraction;
  std::size_t scored;
};

/// Means of the rows of one (method, gamma) cell.
struct EvalAggregate {
  Method method;
  double gamma;
  std::size_t queries;
  double precision;
  double spearman;
  double prune_fraction;
  double scored;
};

/// Count of (query, node) pairs where a node bound fell below the subtree's true maximum.
struct BoundAudit {
  std::size_t pairs = 0;
  std::size_t violations = 0;

  double rate() const noexcept {
    return pairs == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(pairs);
  }
};

struct EvalReport {
  std::size_t num_docs = 0;
  std::size_t k = 0;
  std::vector<std::string> query_ids;
  std::vector<EvalRow> rows;  ///< ordered by (method, gamma, query) as configured
  std::vector<EvalAggregate> aggregates;
  BoundAudit heuristic_audit;
  double heuristic_violation_rate = 0.0;
};

/**
 * Audits every non-root node of `tree` for every query: the node's bound (computed as during
 * search, from the query's projection on the node's path basis) is compared to
 * max_{d in subtree} q^T d. A violation is bound < max - tolerance.
 */
BoundAudit audit_bound(std::span<const SparseVector> docs, std::span<const SparseVector> queries,
                       const PivotTree& tree, BoundVariant variant, double tolerance = 0.0);

/// Violation rate of the heuristic bound at gamma = 1.
double audit_heuristic_bound(std::span<const SparseVector> docs,
                             std::span<const SparseVector> queries, const PivotTree& tree);

/**
 * Builds each index once, computes brute-force truth once per query and evaluates every
 * (method, gamma, query) cell. Deterministic for fixed inputs.
 */
EvalReport run_sweep(const Corpus& corpus, std::span<const SparseVector> queries,
                     std::span<const std::string> query_ids, const SweepConfig& cfg);

/// Six significant digits, as printed in the CSVs.
std::string format_real(double value);

/// Columns: method,gamma,query_id,precision,spearman,prune_fraction,scored
void write_rows_csv(std::ostream& out, const EvalReport& report);
/// Columns: method,gamma,queries,precision,spearman,prune_fraction,scored
void write_summary_csv(std::ostream& out, const EvalReport& report);

}  // namespace pivotree
