// pivotree command-line tool: gen, build, search, eval.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#if __has_include("CLI11.hpp")
#include "CLI11.hpp"
#else
#include <CLI/CLI.hpp>
#endif

#include "pivotree/ball_tree.hpp"
#include "pivotree/corpus_io.hpp"
#include "pivotree/errors.hpp"
#include "pivotree/eval.hpp"
#include "pivotree/index_io.hpp"
#include "pivotree/pivot_tree.hpp"
#include "pivotree/search.hpp"
#include "pivotree/synthetic.hpp"

namespace fs = std::filesystem;
using namespace pivotree;

namespace {

struct GenOptions {
  SyntheticSpec spec;
  std::string out;
};

struct BuildOptions {
  std::string corpus, out, type = "mta", score = "trace", bound = "safe";
  BuildConfig cfg;
};

struct SearchOptions {
  std::string index, corpus, query, bound;
  std::size_t k = 10;
  double gamma = 1.0;
};

struct EvalOptions {
  std::string corpus, queries, out, gammas = "1.0,0.95,0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.25,0.2,0.15,0.1",
                                    methods = "MTA-safe,MTA-heuristic,MIP";
  SweepConfig sweep;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string format_sim(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

int run_gen(const GenOptions& o) {
  const auto docs = generate_corpus(o.spec);
  std::ostringstream meta;
  meta << "generator zipf docs=" << o.spec.docs << " vocab=" << o.spec.vocab
       << " avg_len=" << o.spec.avg_len << " seed=" << o.spec.seed
       << " exponent=" << format_real(o.spec.zipf_exponent) << " prefix=" << o.spec.id_prefix;
  const std::string comment = meta.str();
  auto out = open_out(o.out);
  write_raw_corpus(out, docs, std::span<const std::string>(&comment, 1));
  if (!out) throw Error("failed writing '" + o.out + "'");
  std::cout << "wrote " << docs.size() << " documents to " << o.out << '\n';
  return 0;
}

int run_build(BuildOptions o) {
  const Corpus corpus = parse_corpus(fs::path(o.corpus));
  o.cfg.score = o.score == "raw" ? PivotScore::raw_projection : PivotScore::trace_gain;
  if (o.type == "mta") {
    const PivotTree tree = build_tree(corpus, o.cfg);
    IndexHeader header = make_header(corpus, tree);
    header.default_bound = o.bound == "heuristic" ? BoundKind::heuristic : BoundKind::safe;
    save_index(fs::path(o.out), header, tree);
    std::cout << "MTA index: " << corpus.size() << " documents, " << tree.nodes.size()
              << " nodes, height " << tree.height() << " -> " << o.out << '\n';
  } else {
    const BallTree tree = build_ball_tree(corpus, o.cfg.leaf_capacity, o.cfg.rng_seed);
    save_index(fs::path(o.out), make_header(corpus, tree), tree);
    std::cout << "MIP index: " << corpus.size() << " documents, " << tree.nodes.size()
              << " nodes -> " << o.out << '\n';
  }
  return 0;
}

int run_search(const SearchOptions& o) {
  const LoadedIndex index = load_index(fs::path(o.index));
  const Corpus corpus = parse_corpus(fs::path(o.corpus));
  check_corpus(index.header, corpus);
  const SparseVector q = parse_query_text(o.query, corpus);

  SearchResult res;
  if (const auto* tree = std::get_if<PivotTree>(&index.tree)) {
    BoundVariant variant{index.header.default_bound, o.gamma};
    if (!o.bound.empty())
      variant.kind = o.bound == "heuristic" ? BoundKind::heuristic : BoundKind::safe;
    res = search_tree(*tree, corpus.vectors(), q, o.k, variant);
  } else {
    res = mip_search(std::get<BallTree>(index.tree), corpus.vectors(), q, o.k, o.gamma);
  }

  std::cout << "rank\tdoc_id\tsimilarity\n";
  for (std::size_t i = 0; i < res.hits.size(); ++i)
    std::cout << i + 1 << '\t' << corpus.id(res.hits[i].doc) << '\t'
              << format_sim(res.hits[i].similarity) << '\n';
  std::cout << "scored=" << res.stats.scored << " pruned=" << res.stats.pruned_docs
            << " visited_nodes=" << res.stats.visited_nodes << '\n';
  return 0;
}

int run_eval(EvalOptions o) {
  std::ifstream corpus_in(o.corpus);
  if (!corpus_in) throw Error("cannot open corpus file '" + o.corpus + "'");
  CorpusFile corpus_file = read_corpus_file(corpus_in);
  const auto comments = corpus_file.comments;
  const Corpus corpus = to_corpus(std::move(corpus_file));
  const QuerySet queries = parse_queries(fs::path(o.queries), corpus);

  o.sweep.gammas.clear();
  for (const auto& g : split_list(o.gammas)) {
    try {
      o.sweep.gammas.push_back(std::stod(g));
    } catch (const std::exception&) {
      throw InvalidArgument("bad gamma '" + g + "'");
    }
  }
  o.sweep.methods.clear();
  for (const auto& m : split_list(o.methods)) o.sweep.methods.push_back(parse_method(m));

  const EvalReport report = run_sweep(corpus, queries.vectors, queries.ids, o.sweep);

  const fs::path rows_path(o.out);
  fs::path base = rows_path;
  base.replace_extension();
  const fs::path summary_path = base.string() + ".summary.csv";
  const fs::path meta_path = base.string() + ".meta.txt";
  {
    auto out = open_out(rows_path);
    write_rows_csv(out, report);
  }
  {
    auto out = open_out(summary_path);
    write_summary_csv(out, report);
  }
  {
    auto out = open_out(meta_path);
    out << "corpus=" << o.corpus << "\nqueries=" << o.queries << "\ndocs=" << corpus.size()
        << "\ndim=" << corpus.dim() << "\nquery_count=" << queries.ids.size()
        << "\nk=" << o.sweep.k << "\ngammas=" << o.gammas << "\nmethods=" << o.methods
        << "\nleaf_capacity=" << o.sweep.mta.leaf_capacity
        << "\ncandidate_count=" << o.sweep.mta.candidate_count
        << "\nseed=" << o.sweep.mta.rng_seed << "\nmax_depth=" << o.sweep.mta.max_depth
        << "\nball_leaf_capacity=" << o.sweep.ball_leaf_capacity
        << "\nheuristic_audit_pairs=" << report.heuristic_audit.pairs
        << "\nheuristic_audit_violations=" << report.heuristic_audit.violations;
    char rate[32];
    std::snprintf(rate, sizeof rate, "%.4f", report.heuristic_violation_rate);
    out << "\nheuristic_violation_rate=" << rate << '\n';
    for (const auto& c : comments) out << "corpus_header=" << c << '\n';
  }

  write_summary_csv(std::cout, report);
  std::printf("heuristic bound violation rate: %.4f (%zu of %zu node checks)\n",
              report.heuristic_violation_rate, report.heuristic_audit.violations,
              report.heuristic_audit.pairs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pivotree: pivot-tree top-k inner product search over tf-idf documents"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic Zipf corpus");
  gen_cmd->add_option("--docs", gen.spec.docs, "Number of documents")->required();
  gen_cmd->add_option("--vocab", gen.spec.vocab, "Vocabulary size")->required();
  gen_cmd->add_option("--avg-len", gen.spec.avg_len, "Mean tokens per document")->required();
  gen_cmd->add_option("--seed", gen.spec.seed, "RNG seed");
  gen_cmd->add_option("--zipf", gen.spec.zipf_exponent, "Zipf exponent")->capture_default_str();
  gen_cmd->add_option("--prefix", gen.spec.id_prefix, "Document id prefix")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output corpus file")->required();

  BuildOptions build;
  auto* build_cmd = app.add_subcommand("build", "Build an index over a corpus file");
  build_cmd->add_option("--corpus", build.corpus, "Corpus file")->required();
  build_cmd->add_option("--out", build.out, "Output index file")->required();
  build_cmd->add_option("--type", build.type, "Index type")
      ->check(CLI::IsMember({"mta", "mip"}))
      ->capture_default_str();
  build_cmd->add_option("--leaf", build.cfg.leaf_capacity, "Leaf capacity")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  build_cmd->add_option("--candidates", build.cfg.candidate_count, "Pivot candidates per node")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  build_cmd->add_option("--seed", build.cfg.rng_seed, "RNG seed")->capture_default_str();
  build_cmd->add_option("--max-depth", build.cfg.max_depth, "Maximum tree depth")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  build_cmd->add_option("--score", build.score, "Pivot score (MTA)")
      ->check(CLI::IsMember({"trace", "raw"}))
      ->capture_default_str();
  build_cmd->add_option("--bound", build.bound, "Default bound recorded in the index (MTA)")
      ->check(CLI::IsMember({"safe", "heuristic"}))
      ->capture_default_str();

  SearchOptions search;
  auto* search_cmd = app.add_subcommand("search", "Top-k search with a saved index");
  search_cmd->add_option("--index", search.index, "Index file")->required();
  search_cmd->add_option("--corpus", search.corpus, "Corpus file the index was built from")
      ->required();
  search_cmd->add_option("--query", search.query, "doc_id, 'idx:weight ...' or free text")
      ->required();
  search_cmd->add_option("--k", search.k, "Results to return")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  search_cmd->add_option("--bound", search.bound, "Bound variant (MTA; default from index)")
      ->check(CLI::IsMember({"safe", "heuristic"}));
  search_cmd->add_option("--gamma", search.gamma, "Bound multiplier in (0, 1]")
      ->capture_default_str();

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Precision / Spearman / prunes sweep over gamma");
  eval_cmd->add_option("--corpus", eval.corpus, "Corpus file")->required();
  eval_cmd->add_option("--queries", eval.queries, "Query file (corpus format)")->required();
  eval_cmd->add_option("--k", eval.sweep.k, "Results per query")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval_cmd->add_option("--gammas", eval.gammas, "Comma-separated, descending")
      ->capture_default_str();
  eval_cmd->add_option("--methods", eval.methods, "Comma-separated subset")
      ->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "Per-query CSV; summary/meta files go alongside")
      ->required();
  eval_cmd->add_option("--leaf", eval.sweep.mta.leaf_capacity, "MTA leaf capacity")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval_cmd->add_option("--candidates", eval.sweep.mta.candidate_count, "Pivot candidates")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval_cmd->add_option("--seed", eval.sweep.mta.rng_seed, "MTA build seed")
      ->capture_default_str();
  eval_cmd->add_option("--ball-leaf", eval.sweep.ball_leaf_capacity, "MIP leaf capacity")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*build_cmd) return run_build(build);
    if (*search_cmd) return run_search(search);
    if (*eval_cmd) return run_eval(eval);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "index error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
