#include "pivotree/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "pivotree/ball_tree.hpp"
#include "pivotree/brute_force.hpp"
#include "pivotree/corpus.hpp"
#include "pivotree/errors.hpp"

namespace pivotree {

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::mta_safe:
      return "MTA-safe";
    case Method::mta_heuristic:
      return "MTA-heuristic";
    case Method::mip:
      return "MIP";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::mta_safe, Method::mta_heuristic, Method::mip})
    if (method_name(m) == name) return m;
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

double precision_at_k(std::span<const std::size_t> retrieved, std::span<const std::size_t> truth) {
  if (truth.empty()) throw InvalidArgument("precision needs a non-empty truth list");
  const std::unordered_set<std::size_t> wanted(truth.begin(), truth.end());
  std::unordered_set<std::size_t> seen;
  std::size_t hits = 0;
  for (std::size_t id : retrieved)
    if (wanted.count(id) != 0 && seen.insert(id).second) ++hits;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

namespace {

std::unordered_map<std::size_t, std::size_t> ranks_of(std::span<const std::size_t> ids,
                                                       const char* which) {
  std::unordered_map<std::size_t, std::size_t> ranks;
  ranks.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (!ranks.emplace(ids[i], i + 1).second)
      throw InvalidArgument(std::string("duplicate id in ") + which + " list");
  return ranks;
}

}  // namespace

double spearman_distance(std::span<const std::size_t> retrieved,
                         std::span<const std::size_t> truth) {
  if (truth.empty()) throw InvalidArgument("spearman distance needs a non-empty truth list");
  const auto truth_rank = ranks_of(truth, "truth");
  const auto got_rank = ranks_of(retrieved, "retrieved");
  const std::size_t missing = truth.size() + 1;
  double total = 0.0;
  for (std::size_t id : truth) {
    auto it = got_rank.find(id);
    const auto r = static_cast<double>(it == got_rank.end() ? missing : it->second);
    total += std::abs(r - static_cast<double>(truth_rank.at(id)));
  }
  return total;
}

void SweepConfig::validate() const {
  if (k == 0) throw InvalidArgument("k must be at least 1");
  if (gammas.empty()) throw InvalidArgument("gamma sweep is empty");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    BoundVariant{BoundKind::safe, gammas[i]}.validate();
    if (i > 0 && !(gammas[i] < gammas[i - 1]))
      throw InvalidArgument("gammas must be strictly descending");
  }
  if (methods.empty()) throw InvalidArgument("no methods to evaluate");
  mta.validate();
  if (ball_leaf_capacity == 0) throw InvalidArgument("ball tree leaf capacity must be at least 1");
}

BoundAudit audit_bound(std::span<const SparseVector> docs, std::span<const SparseVector> queries,
                       const PivotTree& tree, BoundVariant variant, double tolerance) {
  variant.validate();
  if (docs.size() != tree.num_docs) throw DimensionMismatch(tree.num_docs, docs.size());
  BoundAudit audit;
  std::vector<double> sims(docs.size());
  std::vector<double> subtree_max(tree.nodes.size());
  std::vector<std::pair<std::size_t, QueryState>> stack;

  for (const SparseVector& q : queries) {
    for (std::size_t d = 0; d < docs.size(); ++d) sims[d] = dot(q, docs[d]);
    // Children follow their parent in pre-order, so a reverse sweep sees them first.
    for (std::size_t n = tree.nodes.size(); n-- > 0;) {
      const PivotNode& node = tree.nodes[n];
      double best = -std::numeric_limits<double>::infinity();
      if (node.is_leaf()) {
        for (std::size_t d : node.docs) best = std::max(best, sims[d]);
      } else {
        best = std::max(subtree_max[node.left], subtree_max[node.right]);
      }
      subtree_max[n] = best;
    }

    stack.clear();
    stack.emplace_back(0, QueryState{});
    while (!stack.empty()) {
      auto [n, state] = std::move(stack.back());
      stack.pop_back();
      const PivotNode& node = tree.nodes[n];
      if (node.is_leaf()) continue;
      QueryState child_state = query_descend_update(state, node, docs[node.pivot_doc], q);
      for (std::size_t child : {node.left, node.right}) {
        ++audit.pairs;
        if (compute_bound(tree.nodes[child], child_state, variant) < subtree_max[child] - tolerance)
          ++audit.violations;
        stack.emplace_back(child, child_state);
      }
    }
  }
  return audit;
}

double audit_heuristic_bound(std::span<const SparseVector> docs,
                             std::span<const SparseVector> queries, const PivotTree& tree) {
  return audit_bound(docs, queries, tree, BoundVariant{BoundKind::heuristic, 1.0}).rate();
}

EvalReport run_sweep(const Corpus& corpus, std::span<const SparseVector> queries,
                     std::span<const std::string> query_ids, const SweepConfig& cfg) {
  cfg.validate();
  if (queries.size() != query_ids.size())
    throw InvalidArgument("query vectors and query ids differ in count");
  for (const auto& q : queries) {
    if (q.dim() != corpus.dim()) throw DimensionMismatch(corpus.dim(), q.dim());
    require_unit(q);
  }

  const auto docs = corpus.vectors();
  const PivotTree mta_tree = build_tree(docs, cfg.mta);
  const bool want_mip = std::find(cfg.methods.begin(), cfg.methods.end(), Method::mip) !=
                        cfg.methods.end();
  const BallTree ball_tree =
      want_mip ? build_ball_tree(docs, cfg.ball_leaf_capacity, cfg.ball_seed) : BallTree{};

  std::vector<std::vector<std::size_t>> truth(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i)
    for (const Hit& h : brute_force_topk(docs, queries[i], cfg.k)) truth[i].push_back(h.doc);

  EvalReport report;
  report.num_docs = docs.size();
  report.k = cfg.k;
  report.query_ids.assign(query_ids.begin(), query_ids.end());
  const double n = static_cast<double>(docs.size());

  std::vector<std::size_t> retrieved;
  for (Method method : cfg.methods) {
    for (double gamma : cfg.gammas) {
      EvalAggregate agg{method, gamma, queries.size(), 0.0, 0.0, 0.0, 0.0};
      for (std::size_t i = 0; i < queries.size(); ++i) {
        SearchResult res;
        switch (method) {
          case Method::mta_safe:
            res = search_tree(mta_tree, docs, queries[i], cfg.k, {BoundKind::safe, gamma});
            break;
          case Method::mta_heuristic:
            res = search_tree(mta_tree, docs, queries[i], cfg.k, {BoundKind::heuristic, gamma});
            break;
          case Method::mip:
            res = mip_search(ball_tree, docs, queries[i], cfg.k, gamma);
            break;
        }
        retrieved.clear();
        for (const Hit& h : res.hits) retrieved.push_back(h.doc);
        EvalRow row{method,
                    gamma,
                    i,
                    precision_at_k(retrieved, truth[i]),
                    spearman_distance(retrieved, truth[i]),
                    static_cast<double>(res.stats.pruned_docs) / n,
                    res.stats.scored};
        agg.precision += row.precision;
        agg.spearman += row.spearman;
        agg.prune_fraction += row.prune_fraction;
        agg.scored += static_cast<double>(row.scored);
        report.rows.push_back(row);
      }
      if (!queries.empty()) {
        const auto count = static_cast<double>(queries.size());
        agg.precision /= count;
        agg.spearman /= count;
        agg.prune_fraction /= count;
        agg.scored /= count;
      }
      report.aggregates.push_back(agg);
    }
  }

  report.heuristic_audit = audit_bound(docs, queries, mta_tree, {BoundKind::heuristic, 1.0});
  report.heuristic_violation_rate = report.heuristic_audit.rate();
  return report;
}

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void write_rows_csv(std::ostream& out, const EvalReport& report) {
  out << "method,gamma,query_id,precision,spearman,prune_fraction,scored\n";
  for (const EvalRow& r : report.rows) {
    out << method_name(r.method) << ',' << format_real(r.gamma) << ','
        << csv_field(report.query_ids.at(r.query)) << ',' << format_real(r.precision) << ','
        << format_real(r.spearman) << ',' << format_real(r.prune_fraction) << ',' << r.scored
        << '\n';
  }
}

void write_summary_csv(std::ostream& out, const EvalReport& report) {
  out << "method,gamma,queries,precision,spearman,prune_fraction,scored\n";
  for (const EvalAggregate& a : report.aggregates) {
    out << method_name(a.method) << ',' << format_real(a.gamma) << ',' << a.queries << ','
        << format_real(a.precision) << ',' << format_real(a.spearman) << ','
        << format_real(a.prune_fraction) << ',' << format_real(a.scored) << '\n';
  }
}

}  // namespace pivotree
