#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pivotree/brute_force.hpp"
#include "pivotree/corpus.hpp"
#include "pivotree/errors.hpp"
#include "pivotree/pivot_tree.hpp"
#include "pivotree/search.hpp"
#include "pivotree/synthetic.hpp"
#include "test_support.hpp"

using namespace pivotree;
using pivotree::testing::axis;
using pivotree::testing::DenseGramSchmidt;
using pivotree::testing::random_unit;

namespace {

constexpr BoundVariant kSafe{BoundKind::safe, 1.0};

Corpus synthetic(std::size_t docs, std::uint64_t seed, std::size_t vocab = 5000,
                 std::size_t len = 60, const std::string& prefix = "d") {
  SyntheticSpec spec;
  spec.docs = docs;
  spec.vocab = vocab;
  spec.avg_len = len;
  spec.seed = seed;
  spec.id_prefix = prefix;
  return tfidf_weigh(generate_corpus(spec));
}

/// Generated query documents weighed into the corpus term space.
std::vector<SparseVector> queries_for(const Corpus& c, std::size_t n, std::uint64_t seed,
                                      std::size_t vocab = 5000, std::size_t len = 60) {
  SyntheticSpec spec;
  spec.docs = n;
  spec.vocab = vocab;
  spec.avg_len = len;
  spec.seed = seed;
  spec.id_prefix = "q";
  std::vector<SparseVector> out;
  for (const auto& raw : generate_corpus(spec)) {
    SparseVector v = c.weigh_query(raw.counts);
    if (!v.empty()) out.push_back(std::move(v));
  }
  return out;
}

void subtree_docs(const PivotTree& t, std::size_t n, std::vector<std::size_t>& out) {
  const auto& node = t.nodes[n];
  if (node.is_leaf()) {
    out.insert(out.end(), node.docs.begin(), node.docs.end());
    return;
  }
  subtree_docs(t, node.left, out);
  subtree_docs(t, node.right, out);
}

double subtree_max(const PivotTree& t, std::span<const SparseVector> docs, std::size_t n,
                   const SparseVector& q) {
  std::vector<std::size_t> members;
  subtree_docs(t, n, members);
  double best = -std::numeric_limits<double>::infinity();
  for (auto d : members) best = std::max(best, dot(q, docs[d]));
  return best;
}

/// Query state used to bound the children of each internal node, by node id.
std::vector<QueryState> child_states(const PivotTree& t, std::span<const SparseVector> docs,
                                     const SparseVector& q) {
  std::vector<QueryState> states(t.nodes.size());
  std::vector<std::pair<std::size_t, QueryState>> stack{{0, QueryState{}}};
  while (!stack.empty()) {
    auto [n, qs] = std::move(stack.back());
    stack.pop_back();
    const auto& node = t.nodes[n];
    if (node.is_leaf()) continue;
    states[n] = query_descend_update(qs, node, docs[node.pivot_doc], q);
    stack.emplace_back(node.left, states[n]);
    stack.emplace_back(node.right, states[n]);
  }
  return states;
}

std::vector<std::size_t> parents(const PivotTree& t) {
  std::vector<std::size_t> p(t.nodes.size(), 0);
  for (std::size_t i = 0; i < t.nodes.size(); ++i)
    if (!t.nodes[i].is_leaf()) p[t.nodes[i].left] = p[t.nodes[i].right] = i;
  return p;
}

std::vector<std::size_t> ids(const std::vector<Hit>& hits) {
  std::vector<std::size_t> out;
  for (const auto& h : hits) out.push_back(h.doc);
  return out;
}

}  // namespace

TEST(TopKQueue, KeepsBestInOrder) {
  TopKQueue q(3);
  EXPECT_EQ(q.kth_value(), -std::numeric_limits<double>::infinity());
  q.push(4, 0.2);
  q.push(1, 0.9);
  q.push(7, 0.5);
  EXPECT_TRUE(q.full());
  EXPECT_DOUBLE_EQ(q.kth_value(), 0.2);
  EXPECT_FALSE(q.push(9, 0.1));
  EXPECT_TRUE(q.push(2, 0.5));
  ASSERT_EQ(q.size(), 3u);
  EXPECT_EQ(q.items()[0], (Hit{1, 0.9}));
  EXPECT_EQ(q.items()[1], (Hit{2, 0.5}));
  EXPECT_EQ(q.items()[2], (Hit{7, 0.5}));
  // Equal similarity and higher index does not displace the last kept hit.
  EXPECT_FALSE(q.push(8, 0.5));
  EXPECT_THROW(TopKQueue(0), InvalidArgument);
}

TEST(ComputeBound, Examples) {
  EXPECT_DOUBLE_EQ(compute_bound(1.0, 1.0, 1.0, kSafe), 1.0);
  EXPECT_DOUBLE_EQ(compute_bound(1.0, 1.0, 0.0, kSafe), 0.0);
  EXPECT_DOUBLE_EQ(compute_bound(0.0, 0.0, 0.0, kSafe), 1.0);
  const BoundVariant heur{BoundKind::heuristic, 1.0};
  EXPECT_DOUBLE_EQ(compute_bound(1.0, 1.0, 1.0, heur), 1.0);
  EXPECT_DOUBLE_EQ(compute_bound(1.0, 1.0, 0.0, heur), 0.0);
  // a = 0.6, envelope [0.25, 0.64]: 0.6 * 0.8 + 0.8 * sqrt(0.75)
  EXPECT_NEAR(compute_bound(0.25, 0.64, 0.36, kSafe), 0.48 + 0.8 * std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(compute_bound(0.25, 0.64, 0.36, heur), 1.0 + 0.96 - 0.6 - 0.5, 1e-15);
  EXPECT_NEAR(compute_bound(0.25, 0.64, 0.36, BoundVariant{BoundKind::safe, 0.5}),
              0.5 * (0.48 + 0.8 * std::sqrt(0.75)), 1e-15);
}

TEST(ComputeBound, ClampsRoundingOutsideUnitRange) {
  const double b = compute_bound(-1e-17, 1.0 + 1e-15, 1.0 + 1e-15, kSafe);
  EXPECT_TRUE(std::isfinite(b));
  EXPECT_DOUBLE_EQ(b, 1.0);
  EXPECT_TRUE(std::isfinite(compute_bound(-1e-17, 1.0 + 1e-15, -1e-17,
                                          BoundVariant{BoundKind::heuristic, 1.0})));
}

TEST(ComputeBound, SafeDominatesPairwiseInnerProducts) {
  // One-level check against a dense oracle: for any d and q, the bound built from the exact
  // projections of d alone is at least q^T d.
  std::mt19937_64 gen(12);
  const std::size_t dim = 60;
  for (int trial = 0; trial < 200; ++trial) {
    DenseGramSchmidt basis(dim);
    const int depth = 1 + trial % 6;
    for (int i = 0; i < depth; ++i) basis.append(random_unit(gen, dim, 8));
    const auto q = random_unit(gen, dim, 10);
    const auto d = random_unit(gen, dim, 10);
    const double dp = basis.proj_sq(d);
    EXPECT_GE(compute_bound(dp, dp, basis.proj_sq(q), kSafe), dot(q, d) - 1e-12);
  }
}

TEST(ComputeBound, VariantValidation) {
  EXPECT_THROW((BoundVariant{BoundKind::safe, 0.0}.validate()), InvalidArgument);
  EXPECT_THROW((BoundVariant{BoundKind::safe, 1.5}.validate()), InvalidArgument);
  EXPECT_THROW((BoundVariant{BoundKind::safe, std::nan("")}.validate()), InvalidArgument);
  EXPECT_NO_THROW((BoundVariant{BoundKind::heuristic, 0.1}.validate()));
}

TEST(QueryDescend, AxisExamples) {
  Basis root(3);
  PivotNode node;
  node.ext = root.prepare(axis(1, 3));
  const auto qs = query_descend_update(QueryState{}, node, axis(1, 3), axis(1, 3));
  EXPECT_DOUBLE_EQ(qs.proj_norm_sq, 1.0);
  ASSERT_EQ(qs.coords.size(), 1u);

  const auto ortho = query_descend_update(QueryState{}, node, axis(1, 3), axis(2, 3));
  EXPECT_EQ(ortho.proj_norm_sq, 0.0);
  PivotNode second;
  second.ext = root.extend(axis(1, 3)).first.prepare(axis(0, 3));
  EXPECT_EQ(query_descend_update(ortho, second, axis(0, 3), axis(2, 3)).proj_norm_sq, 0.0);
}

TEST(QueryDescend, MatchesDenseOracleToDepthTen) {
  std::mt19937_64 gen(8);
  const std::size_t dim = 200;
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = random_unit(gen, dim, 30);
    Basis b(dim);
    DenseGramSchmidt oracle(dim);
    QueryState qs;
    while (b.depth() < 10) {
      const auto p = random_unit(gen, dim, 20);
      PivotNode node;
      auto [next, rec] = b.extend(p);
      node.ext = rec;
      qs = query_descend_update(qs, node, p, q);
      oracle.append(p);
      b = std::move(next);
      EXPECT_NEAR(qs.proj_norm_sq, oracle.proj_sq(q), 1e-8);
    }
  }
}

TEST(SearchTree, OrthogonalDocs) {
  std::vector<SparseVector> docs{axis(0, 3), axis(1, 3), axis(2, 3)};
  BuildConfig cfg;
  cfg.leaf_capacity = 1;
  const PivotTree t = build_tree(docs, cfg);
  const auto r = search_tree(t, docs, axis(0, 3), 1, kSafe);
  ASSERT_EQ(r.hits.size(), 1u);
  EXPECT_EQ(r.hits[0], (Hit{0, 1.0}));
  EXPECT_EQ(r.stats.scored + r.stats.pruned_docs, 3u);
}

TEST(SearchTree, KAtLeastNReturnsEverything) {
  std::mt19937_64 gen(2);
  std::vector<SparseVector> docs;
  for (int i = 0; i < 40; ++i) docs.push_back(random_unit(gen, 50, 6, true));
  BuildConfig cfg;
  cfg.leaf_capacity = 4;
  const PivotTree t = build_tree(docs, cfg);
  const auto q = random_unit(gen, 50, 10, true);
  for (std::size_t k : {40u, 100u}) {
    const auto r = search_tree(t, docs, q, k, kSafe);
    ASSERT_EQ(r.hits.size(), 40u);
    EXPECT_EQ(r.stats.scored, 40u);
    EXPECT_EQ(r.hits, brute_force_topk(docs, q, k));
    for (std::size_t i = 1; i < r.hits.size(); ++i)
      EXPECT_GE(r.hits[i - 1].similarity, r.hits[i].similarity);
  }
}

TEST(SearchTree, ExactAgainstBruteForce) {
  const Corpus c = synthetic(2000, 7);
  BuildConfig cfg;
  cfg.rng_seed = 7;
  const PivotTree t = build_tree(c, cfg);
  const auto queries = queries_for(c, 100, 8);
  ASSERT_GE(queries.size(), 95u);
  for (const auto& q : queries) {
    for (std::size_t k : {1u, 10u}) {
      const auto r = search_tree(t, c.vectors(), q, k, kSafe);
      const auto truth = brute_force_topk(c.vectors(), q, k);
      EXPECT_EQ(ids(r.hits), ids(truth));
      for (std::size_t i = 0; i < truth.size(); ++i)
        EXPECT_NEAR(r.hits[i].similarity, truth[i].similarity, 1e-9);
      EXPECT_EQ(r.stats.scored + r.stats.pruned_docs, c.size());
    }
  }
}

TEST(SearchTree, SafeBoundAdmissibleAtEveryDecision) {
  const Corpus c = synthetic(1500, 21, 3000, 40);
  BuildConfig cfg;
  cfg.leaf_capacity = 16;
  const PivotTree t = build_tree(c, cfg);
  std::mt19937_64 gen(4);
  std::size_t checked = 0;
  for (const auto& q : queries_for(c, 30, 22, 3000, 40)) {
    std::vector<BoundDecision> trace;
    search_tree(t, c.vectors(), q, 10, kSafe, &trace);
    for (const auto& d : trace) {
      EXPECT_GE(d.bound, subtree_max(t, c.vectors(), d.node, q) - 1e-9) << "node " << d.node;
      ++checked;
    }
  }
  EXPECT_GT(checked, 0u);
}

TEST(SearchTree, QueryStatesMatchDenseOracle) {
  const Corpus c = synthetic(600, 5, 2000, 40);
  BuildConfig cfg;
  cfg.leaf_capacity = 8;
  const PivotTree t = build_tree(c, cfg);
  const auto q = queries_for(c, 1, 6, 2000, 40).front();
  const auto states = child_states(t, c.vectors(), q);
  std::vector<std::pair<std::size_t, DenseGramSchmidt>> stack{{0, DenseGramSchmidt(c.dim())}};
  while (!stack.empty()) {
    auto [n, oracle] = std::move(stack.back());
    stack.pop_back();
    const auto& node = t.nodes[n];
    if (node.is_leaf()) continue;
    oracle.append(c.vector(node.pivot_doc));
    EXPECT_NEAR(states[n].proj_norm_sq, oracle.proj_sq(q), 1e-8);
    stack.emplace_back(node.left, oracle);
    stack.emplace_back(node.right, oracle);
  }
}

TEST(SearchTree, PruneAccountingAcrossGammas) {
  const Corpus c = synthetic(1000, 9, 3000, 40);
  BuildConfig cfg;
  cfg.leaf_capacity = 16;
  const PivotTree t = build_tree(c, cfg);
  for (const auto& q : queries_for(c, 20, 10, 3000, 40))
    for (auto kind : {BoundKind::safe, BoundKind::heuristic})
      for (double g : {1.0, 0.7, 0.4, 0.1}) {
        const auto r = search_tree(t, c.vectors(), q, 10, BoundVariant{kind, g});
        EXPECT_EQ(r.stats.scored + r.stats.pruned_docs, c.size());
        EXPECT_EQ(r.hits.size(), 10u);
        for (const auto& h : r.hits) EXPECT_TRUE(std::isfinite(h.similarity));
      }
}

TEST(SearchTree, LoweringGammaNeverUnprunesOnReplay) {
  const Corpus c = synthetic(1000, 13, 3000, 40);
  BuildConfig cfg;
  cfg.leaf_capacity = 16;
  const PivotTree t = build_tree(c, cfg);
  const auto par = parents(t);
  for (const auto& q : queries_for(c, 20, 14, 3000, 40)) {
    const auto states = child_states(t, c.vectors(), q);
    for (auto kind : {BoundKind::safe, BoundKind::heuristic}) {
      std::vector<BoundDecision> trace;
      search_tree(t, c.vectors(), q, 10, BoundVariant{kind, 1.0}, &trace);
      for (const auto& d : trace) {
        const auto& qs = states[par[d.node]];
        EXPECT_DOUBLE_EQ(compute_bound(t.nodes[d.node], qs, BoundVariant{kind, 1.0}), d.bound);
        for (double g : {0.9, 0.5, 0.2}) {
          const double lowered = compute_bound(t.nodes[d.node], qs, BoundVariant{kind, g});
          if (d.bound >= 0.0) EXPECT_LE(lowered, d.bound);
          if (d.pruned && d.bound >= 0.0) EXPECT_LT(lowered, d.kth);
        }
      }
    }
  }
}

TEST(SearchTree, Errors) {
  std::vector<SparseVector> docs{axis(0, 3), axis(1, 3)};
  const PivotTree t = build_tree(docs, BuildConfig{});
  EXPECT_THROW(search_tree(t, docs, axis(0, 3), 0, kSafe), InvalidArgument);
  EXPECT_THROW(search_tree(t, docs, axis(0, 4), 1, kSafe), DimensionMismatch);
  EXPECT_THROW(search_tree(t, docs, axis(0, 3, 2.0), 1, kSafe), InvalidArgument);
  EXPECT_THROW(search_tree(t, docs, axis(0, 3), 1, BoundVariant{BoundKind::safe, 0.0}),
               InvalidArgument);
}
