#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pivotree/ball_tree.hpp"
#include "pivotree/brute_force.hpp"
#include "pivotree/corpus.hpp"
#include "pivotree/errors.hpp"
#include "pivotree/synthetic.hpp"
#include "test_support.hpp"

using namespace pivotree;
using pivotree::testing::axis;
using pivotree::testing::random_unit;
using pivotree::testing::to_dense;

namespace {

void members(const BallTree& t, std::size_t n, std::vector<std::size_t>& out) {
  const auto& node = t.nodes[n];
  if (node.is_leaf()) {
    out.insert(out.end(), node.docs.begin(), node.docs.end());
    return;
  }
  members(t, node.left, out);
  members(t, node.right, out);
}

Corpus synthetic(std::size_t docs, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.docs = docs;
  spec.vocab = 3000;
  spec.avg_len = 40;
  spec.seed = seed;
  return tfidf_weigh(generate_corpus(spec));
}

std::vector<std::size_t> ids(const std::vector<Hit>& hits) {
  std::vector<std::size_t> out;
  for (const auto& h : hits) out.push_back(h.doc);
  return out;
}

}  // namespace

TEST(BruteForce, Examples) {
  std::vector<SparseVector> docs{axis(0, 3), axis(1, 3), axis(2, 3)};
  const auto top = brute_force_topk(docs, axis(1, 3), 1);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0], (Hit{1, 1.0}));

  // Ties break toward the lower index.
  const auto all = brute_force_topk(docs, axis(1, 3), 3);
  EXPECT_EQ(ids(all), (std::vector<std::size_t>{1, 0, 2}));

  EXPECT_THROW(brute_force_topk(docs, axis(0, 4), 1), DimensionMismatch);
  EXPECT_THROW(brute_force_topk(docs, axis(0, 3), 0), InvalidArgument);
}

TEST(BruteForce, FullRankingMatchesDenseScores) {
  std::mt19937_64 gen(1);
  std::vector<SparseVector> docs;
  for (int i = 0; i < 200; ++i) docs.push_back(random_unit(gen, 80, 10));
  const auto q = random_unit(gen, 80, 20);
  const auto ranking = brute_force_topk(docs, q, docs.size());
  ASSERT_EQ(ranking.size(), docs.size());
  const Eigen::VectorXd qd = to_dense(q);
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    EXPECT_NEAR(ranking[i].similarity, qd.dot(to_dense(docs[ranking[i].doc])), 1e-12);
    if (i > 0) EXPECT_GE(ranking[i - 1].similarity, ranking[i].similarity);
  }
}

TEST(BallTree, SingleLeafRadiusIsMaxDistanceToMean) {
  std::vector<SparseVector> docs{axis(0, 2), axis(1, 2)};
  const BallTree t = build_ball_tree(docs, 32, 0);
  ASSERT_EQ(t.nodes.size(), 1u);
  const auto& root = t.root();
  EXPECT_TRUE(root.is_leaf());
  EXPECT_EQ(root.centroid, SparseVector(2, {0, 1}, {0.5, 0.5}));
  EXPECT_NEAR(root.radius, std::sqrt(0.5), 1e-15);
}

TEST(BallTree, InvariantsOnSyntheticCorpus) {
  const Corpus c = synthetic(1500, 3);
  const BallTree t = build_ball_tree(c, 16, 5);
  std::vector<std::size_t> all;
  members(t, 0, all);
  std::sort(all.begin(), all.end());
  ASSERT_EQ(all.size(), c.size());
  for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], i);

  for (std::size_t n = 0; n < t.nodes.size(); ++n) {
    const auto& node = t.nodes[n];
    std::vector<std::size_t> m;
    members(t, n, m);
    EXPECT_EQ(m.size(), node.subtree_size);
    EXPECT_GE(node.radius, 0.0);
    if (node.is_leaf()) EXPECT_LE(node.docs.size(), 16u);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.dim()));
    for (auto d : m) mean += to_dense(c.vector(d));
    mean /= static_cast<double>(m.size());
    EXPECT_LE((to_dense(node.centroid) - mean).cwiseAbs().maxCoeff(), 1e-12);
    for (auto d : m)
      EXPECT_LE((to_dense(c.vector(d)) - mean).norm(), node.radius + 1e-9) << "node " << n;
  }
}

TEST(BallTree, SeparatesTwoClusters) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> noise(0.0, 0.02);
  const std::size_t dim = 20;
  std::vector<SparseVector> docs;
  for (int i = 0; i < 40; ++i) {
    const std::size_t base = i < 20 ? 0 : 10;
    std::vector<std::pair<TermIndex, double>> e;
    for (std::size_t j = 0; j < 3; ++j)
      e.emplace_back(static_cast<TermIndex>(base + j), 1.0 + noise(gen));
    docs.push_back(normalize(SparseVector::from_entries(dim, std::move(e))));
  }
  const BallTree t = build_ball_tree(docs, 20, 0);
  const auto& root = t.root();
  ASSERT_FALSE(root.is_leaf());
  std::vector<std::size_t> left, right;
  members(t, root.left, left);
  members(t, root.right, right);
  ASSERT_EQ(left.size(), 20u);
  ASSERT_EQ(right.size(), 20u);
  const bool left_low = left.front() < 20;
  for (auto d : left) EXPECT_EQ(d < 20, left_low);
  for (auto d : right) EXPECT_EQ(d < 20, !left_low);
  const double gap =
      std::sqrt(distance_sq(t.nodes[root.left].centroid, t.nodes[root.right].centroid));
  EXPECT_LT(t.nodes[root.left].radius, gap);
  EXPECT_LT(t.nodes[root.right].radius, gap);
}

TEST(BallTree, IdenticalDocsBecomeLeaf) {
  std::vector<SparseVector> docs(10, axis(1, 3));
  const BallTree t = build_ball_tree(docs, 1, 0);
  ASSERT_EQ(t.nodes.size(), 1u);
  EXPECT_EQ(t.root().radius, 0.0);
}

TEST(BallTree, RejectsBadInput) {
  EXPECT_THROW(build_ball_tree(std::vector<SparseVector>{}, 4, 0), InvalidArgument);
  EXPECT_THROW(build_ball_tree(std::vector<SparseVector>{axis(0, 2)}, 0, 0), InvalidArgument);
  EXPECT_THROW(build_ball_tree(std::vector<SparseVector>{axis(0, 2), axis(0, 3)}, 4, 0),
               DimensionMismatch);
}

TEST(MipBound, Examples) {
  BallNode single(axis(0, 3, 0.6));
  single.radius = 0.0;
  const auto q = normalize(SparseVector(3, {0, 1}, {1.0, 1.0}));
  EXPECT_NEAR(mip_bound(single, q), 0.6 / std::sqrt(2.0), 1e-15);

  BallNode ball(SparseVector(3, {0, 1}, {0.3, 0.4}));
  ball.radius = 0.2;
  EXPECT_NEAR(mip_bound(ball, normalize(ball.centroid)), 0.5 + 0.2, 1e-15);
}

TEST(MipBound, AdmissibleOnEveryNode) {
  const Corpus c = synthetic(800, 11);
  const BallTree t = build_ball_tree(c, 8, 0);
  std::mt19937_64 gen(3);
  for (int i = 0; i < 20; ++i) {
    const auto q = c.vector(gen() % c.size());
    for (std::size_t n = 0; n < t.nodes.size(); ++n) {
      std::vector<std::size_t> m;
      members(t, n, m);
      double best = -std::numeric_limits<double>::infinity();
      for (auto d : m) best = std::max(best, dot(q, c.vector(d)));
      EXPECT_GE(mip_bound(t.nodes[n], q), best - 1e-9);
    }
  }
}

TEST(MipSearch, Examples) {
  std::vector<SparseVector> docs{axis(0, 3), axis(1, 3), axis(2, 3)};
  const BallTree t = build_ball_tree(docs, 1, 0);
  const auto r = mip_search(t, docs, axis(0, 3), 1, 1.0);
  ASSERT_EQ(r.hits.size(), 1u);
  EXPECT_EQ(r.hits[0], (Hit{0, 1.0}));
  const auto all = mip_search(t, docs, axis(2, 3), 5, 1.0);
  EXPECT_EQ(all.hits, brute_force_topk(docs, axis(2, 3), 5));
}

TEST(MipSearch, ExactAndAccounted) {
  const Corpus c = synthetic(1500, 19);
  const BallTree t = build_ball_tree(c, 32, 0);
  SyntheticSpec qspec;
  qspec.docs = 50;
  qspec.vocab = 3000;
  qspec.avg_len = 40;
  qspec.seed = 20;
  for (const auto& raw : generate_corpus(qspec)) {
    const auto q = c.weigh_query(raw.counts);
    if (q.empty()) continue;
    for (std::size_t k : {1u, 10u}) {
      const auto r = mip_search(t, c.vectors(), q, k, 1.0);
      const auto truth = brute_force_topk(c.vectors(), q, k);
      EXPECT_EQ(ids(r.hits), ids(truth));
      for (std::size_t i = 0; i < truth.size(); ++i)
        EXPECT_NEAR(r.hits[i].similarity, truth[i].similarity, 1e-9);
      EXPECT_EQ(r.stats.scored + r.stats.pruned_docs, c.size());
    }
    for (double g : {0.8, 0.5, 0.2}) {
      const auto r = mip_search(t, c.vectors(), q, 10, g);
      EXPECT_EQ(r.stats.scored + r.stats.pruned_docs, c.size());
    }
  }
}

TEST(MipSearch, Errors) {
  std::vector<SparseVector> docs{axis(0, 3), axis(1, 3)};
  const BallTree t = build_ball_tree(docs, 4, 0);
  EXPECT_THROW(mip_search(t, docs, axis(0, 3), 0, 1.0), InvalidArgument);
  EXPECT_THROW(mip_search(t, docs, axis(0, 4), 1, 1.0), DimensionMismatch);
  EXPECT_THROW(mip_search(t, docs, axis(0, 3), 1, 0.0), InvalidArgument);
  EXPECT_THROW(mip_search(t, docs, axis(0, 3), 1, 1.1), InvalidArgument);
}
