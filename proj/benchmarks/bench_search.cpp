#include <benchmark/benchmark.h>

#include <map>

#include "pivotree/ball_tree.hpp"
#include "pivotree/brute_force.hpp"
#include "pivotree/corpus.hpp"
#include "pivotree/pivot_tree.hpp"
#include "pivotree/search.hpp"
#include "pivotree/synthetic.hpp"

using namespace pivotree;

namespace {

struct Workload {
  Corpus corpus;
  std::vector<SparseVector> queries;
  PivotTree mta;
  BallTree mip;
};

// Built once per corpus size and shared by all benchmarks.
const Workload& workload(std::size_t docs) {
  static std::map<std::size_t, Workload> cache;
  auto it = cache.find(docs);
  if (it != cache.end()) return it->second;
  SyntheticSpec spec;
  spec.docs = docs;
  spec.vocab = 5000;
  spec.avg_len = 60;
  spec.seed = 7;
  Corpus corpus = tfidf_weigh(generate_corpus(spec));
  spec.docs = 64;
  spec.seed = 8;
  spec.id_prefix = "q";
  std::vector<SparseVector> queries;
  for (const auto& raw : generate_corpus(spec)) queries.push_back(corpus.weigh_query(raw.counts));
  PivotTree mta = build_tree(corpus, BuildConfig{});
  BallTree mip = build_ball_tree(corpus, 32, 0);
  return cache
      .emplace(docs, Workload{std::move(corpus), std::move(queries), std::move(mta),
                              std::move(mip)})
      .first->second;
}

double gamma_arg(const benchmark::State& state) {
  return static_cast<double>(state.range(1)) / 100.0;
}

void BM_BuildPivotTree(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_tree(w.corpus, BuildConfig{}));
}

void BM_BuildBallTree(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_ball_tree(w.corpus, 32, 0));
}

void BM_SearchPivotTree(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  const BoundVariant variant{BoundKind::safe, gamma_arg(state)};
  std::size_t i = 0, scored = 0;
  for (auto _ : state) {
    auto r = search_tree(w.mta, w.corpus.vectors(), w.queries[i++ % w.queries.size()], 10, variant);
    scored += r.stats.scored;
    benchmark::DoNotOptimize(r);
  }
  state.counters["scored"] =
      benchmark::Counter(static_cast<double>(scored), benchmark::Counter::kAvgIterations);
}

void BM_SearchBallTree(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0, scored = 0;
  for (auto _ : state) {
    auto r = mip_search(w.mip, w.corpus.vectors(), w.queries[i++ % w.queries.size()], 10,
                        gamma_arg(state));
    scored += r.stats.scored;
    benchmark::DoNotOptimize(r);
  }
  state.counters["scored"] =
      benchmark::Counter(static_cast<double>(scored), benchmark::Counter::kAvgIterations);
}

void BM_BruteForce(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        brute_force_topk(w.corpus.vectors(), w.queries[i++ % w.queries.size()], 10));
}

}  // namespace

BENCHMARK(BM_BuildPivotTree)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildBallTree)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);
// Second argument is gamma in percent.
BENCHMARK(BM_SearchPivotTree)->ArgsProduct({{2000, 8000}, {100, 20}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SearchBallTree)->ArgsProduct({{2000, 8000}, {100, 20}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BruteForce)->Arg(2000)->Arg(8000)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
