#include "pivotree/index_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>

#include "pivotree/corpus.hpp"
#include "pivotree/errors.hpp"

namespace pivotree {

namespace {

constexpr char kMagic[8] = {'P', 'V', 'T', 'R', 'E', 'E', 'I', 'X'};
constexpr std::size_t kMaxLoadDepth = 4096;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void reals(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void bytes(const char* p, std::size_t n) { buf_.append(p, n); }

  void finish(std::ostream& out) {
    u64(fnv1a(buf_));
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw Error("failed to write index");
  }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t count(std::size_t elem_size) {
    const std::uint64_t n = u64();
    if (n > (data_.size() - pos_) / elem_size) throw FormatError("index file truncated");
    return static_cast<std::size_t>(n);
  }
  std::vector<double> reals() {
    std::vector<double> v(count(8));
    for (double& x : v) x = f64();
    return v;
  }
  bool at_end() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw FormatError("index file truncated");
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

void write_header(Writer& w, const IndexHeader& h, std::size_t node_count) {
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kIndexFormatVersion);
  w.u8(static_cast<std::uint8_t>(h.type));
  w.u64(h.dim);
  w.u64(h.num_docs);
  w.u64(h.build.leaf_capacity);
  w.u64(h.build.candidate_count);
  w.u64(h.build.rng_seed);
  w.u64(h.build.max_depth);
  w.u8(static_cast<std::uint8_t>(h.build.score));
  w.u8(static_cast<std::uint8_t>(h.default_bound));
  w.u64(h.corpus_fingerprint);
  w.reals(h.idf);
  w.u64(node_count);
}

void write_doc_list(Writer& w, const std::vector<std::size_t>& docs) {
  w.u64(docs.size());
  for (std::size_t d : docs) w.u64(d);
}

void write_pivot_node(Writer& w, const PivotTree& tree, std::size_t n) {
  const PivotNode& node = tree.nodes[n];
  w.u8(node.is_leaf() ? 0 : 1);
  w.f64(node.min_proj_sq);
  w.f64(node.max_proj_sq);
  w.u64(node.subtree_size);
  if (node.is_leaf()) {
    write_doc_list(w, node.docs);
    return;
  }
  w.u64(node.pivot_doc);
  w.f64(node.split_threshold);
  w.f64(node.ext.alpha);
  w.reals(node.ext.w);
  w.reals(node.ext.pivot_dots);
  write_pivot_node(w, tree, node.left);
  write_pivot_node(w, tree, node.right);
}

void write_ball_node(Writer& w, const BallTree& tree, std::size_t n) {
  const BallNode& node = tree.nodes[n];
  w.u8(node.is_leaf() ? 0 : 1);
  w.f64(node.radius);
  w.u64(node.subtree_size);
  w.u64(node.centroid.nnz());
  for (std::size_t i = 0; i < node.centroid.nnz(); ++i) {
    w.u32(node.centroid.indices()[i]);
    w.f64(node.centroid.weights()[i]);
  }
  if (node.is_leaf()) {
    write_doc_list(w, node.docs);
    return;
  }
  write_ball_node(w, tree, node.left);
  write_ball_node(w, tree, node.right);
}

/// Shared load-time checks: doc references in range, each document in exactly one leaf.
class DocCoverage {
 public:
  explicit DocCoverage(std::size_t n) : seen_(n, false) {}

  std::vector<std::size_t> read_leaf(Reader& r) {
    std::vector<std::size_t> docs(r.count(8));
    for (auto& d : docs) {
      const std::uint64_t v = r.u64();
      if (v >= seen_.size()) throw FormatError("leaf references document out of range");
      if (seen_[v]) throw FormatError("document appears in more than one leaf");
      seen_[v] = true;
      ++covered_;
      d = static_cast<std::size_t>(v);
    }
    return docs;
  }
  void require_complete() const {
    if (covered_ != seen_.size()) throw FormatError("leaves do not cover the corpus");
  }

 private:
  std::vector<bool> seen_;
  std::size_t covered_ = 0;
};

std::size_t read_pivot_node(Reader& r, PivotTree& tree, DocCoverage& cov, std::size_t depth) {
  if (depth > kMaxLoadDepth) throw FormatError("tree too deep");
  const std::uint8_t kind = r.u8();
  if (kind > 1) throw FormatError("bad node kind");
  const std::size_t id = tree.nodes.size();
  tree.nodes.emplace_back();
  {
    PivotNode& node = tree.nodes[id];
    node.min_proj_sq = r.f64();
    node.max_proj_sq = r.f64();
    node.subtree_size = r.u64();
    node.leaf = kind == 0;
  }
  if (kind == 0) {
    auto docs = cov.read_leaf(r);
    if (docs.size() != tree.nodes[id].subtree_size) throw FormatError("leaf size mismatch");
    tree.nodes[id].docs = std::move(docs);
    return id;
  }
  {
    PivotNode& node = tree.nodes[id];
    node.pivot_doc = r.u64();
    if (node.pivot_doc >= tree.num_docs) throw FormatError("pivot out of range");
    node.split_threshold = r.f64();
    node.ext.alpha = r.f64();
    node.ext.w = r.reals();
    node.ext.pivot_dots = r.reals();
    if (node.ext.w.size() != depth || node.ext.pivot_dots.size() != depth)
      throw FormatError("extension record does not match node depth");
  }
  const std::size_t left = read_pivot_node(r, tree, cov, depth + 1);
  const std::size_t right = read_pivot_node(r, tree, cov, depth + 1);
  PivotNode& node = tree.nodes[id];
  node.left = left;
  node.right = right;
  if (tree.nodes[left].subtree_size + tree.nodes[right].subtree_size != node.subtree_size)
    throw FormatError("subtree sizes inconsistent");
  return id;
}

std::size_t read_ball_node(Reader& r, BallTree& tree, DocCoverage& cov, std::size_t depth) {
  if (depth > kMaxLoadDepth) throw FormatError("tree too deep");
  const std::uint8_t kind = r.u8();
  if (kind > 1) throw FormatError("bad node kind");
  const double radius = r.f64();
  const std::size_t subtree_size = r.u64();
  const std::size_t nnz = r.count(12);
  std::vector<TermIndex> idx(nnz);
  std::vector<double> weights(nnz);
  for (std::size_t i = 0; i < nnz; ++i) {
    idx[i] = r.u32();
    weights[i] = r.f64();
  }
  SparseVector centroid = [&] {
    try {
      return SparseVector(tree.dim, std::move(idx), std::move(weights));
    } catch (const InvalidArgument& e) {
      throw FormatError(std::string("bad centroid: ") + e.what());
    }
  }();
  const std::size_t id = tree.nodes.size();
  tree.nodes.emplace_back(std::move(centroid));
  tree.nodes[id].radius = radius;
  tree.nodes[id].subtree_size = subtree_size;
  tree.nodes[id].leaf = kind == 0;
  if (kind == 0) {
    auto docs = cov.read_leaf(r);
    if (docs.size() != subtree_size) throw FormatError("leaf size mismatch");
    tree.nodes[id].docs = std::move(docs);
    return id;
  }
  const std::size_t left = read_ball_node(r, tree, cov, depth + 1);
  const std::size_t right = read_ball_node(r, tree, cov, depth + 1);
  tree.nodes[id].left = left;
  tree.nodes[id].right = right;
  if (tree.nodes[left].subtree_size + tree.nodes[right].subtree_size != subtree_size)
    throw FormatError("subtree sizes inconsistent");
  return id;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

IndexHeader make_header(const Corpus& corpus, const PivotTree& tree) {
  IndexHeader h;
  h.type = IndexType::mta;
  h.dim = tree.dim;
  h.num_docs = tree.num_docs;
  h.build = tree.config;
  h.corpus_fingerprint = corpus.fingerprint();
  h.idf.assign(corpus.idf().begin(), corpus.idf().end());
  return h;
}

IndexHeader make_header(const Corpus& corpus, const BallTree& tree) {
  IndexHeader h;
  h.type = IndexType::mip;
  h.dim = tree.dim;
  h.num_docs = tree.num_docs;
  h.build.leaf_capacity = tree.leaf_capacity;
  h.build.rng_seed = tree.seed;
  h.corpus_fingerprint = corpus.fingerprint();
  h.idf.assign(corpus.idf().begin(), corpus.idf().end());
  return h;
}

void save_index(std::ostream& out, const IndexHeader& header, const PivotTree& tree) {
  if (header.type != IndexType::mta) throw InvalidArgument("header type is not MTA");
  Writer w;
  write_header(w, header, tree.nodes.size());
  if (!tree.nodes.empty()) write_pivot_node(w, tree, 0);
  w.finish(out);
}

void save_index(std::ostream& out, const IndexHeader& header, const BallTree& tree) {
  if (header.type != IndexType::mip) throw InvalidArgument("header type is not MIP");
  Writer w;
  write_header(w, header, tree.nodes.size());
  if (!tree.nodes.empty()) write_ball_node(w, tree, 0);
  w.finish(out);
}

void save_index(const std::filesystem::path& path, const IndexHeader& header,
                const PivotTree& tree) {
  auto out = open_for_write(path);
  save_index(out, header, tree);
}

void save_index(const std::filesystem::path& path, const IndexHeader& header,
                const BallTree& tree) {
  auto out = open_for_write(path);
  save_index(out, header, tree);
}

LoadedIndex load_index(std::istream& in) {
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < sizeof kMagic + 8 || std::memcmp(data.data(), kMagic, sizeof kMagic) != 0)
    throw FormatError("not a pivotree index file");
  const std::string_view body(data.data(), data.size() - 8);
  Reader tail(std::string_view(data).substr(data.size() - 8));
  if (tail.u64() != fnv1a(body)) throw FormatError("index checksum mismatch");

  Reader r(body.substr(sizeof kMagic));
  const std::uint32_t version = r.u32();
  if (version != kIndexFormatVersion)
    throw FormatError("unsupported index version " + std::to_string(version));

  IndexHeader h;
  const std::uint8_t type = r.u8();
  if (type != static_cast<std::uint8_t>(IndexType::mta) &&
      type != static_cast<std::uint8_t>(IndexType::mip))
    throw FormatError("unknown index type");
  h.type = static_cast<IndexType>(type);
  h.dim = r.u64();
  h.num_docs = r.u64();
  h.build.leaf_capacity = r.u64();
  h.build.candidate_count = r.u64();
  h.build.rng_seed = r.u64();
  h.build.max_depth = r.u64();
  const std::uint8_t score = r.u8();
  const std::uint8_t bound = r.u8();
  if (score > 1 || bound > 1) throw FormatError("bad header enum");
  h.build.score = static_cast<PivotScore>(score);
  h.default_bound = static_cast<BoundKind>(bound);
  h.corpus_fingerprint = r.u64();
  h.idf = r.reals();
  const std::size_t node_count = r.u64();
  if (h.dim == 0 || h.num_docs == 0 || node_count == 0) throw FormatError("empty index");

  DocCoverage cov(h.num_docs);
  LoadedIndex loaded{h, PivotTree{}};
  if (h.type == IndexType::mta) {
    PivotTree tree;
    tree.dim = h.dim;
    tree.num_docs = h.num_docs;
    tree.config = h.build;
    tree.nodes.reserve(node_count);
    read_pivot_node(r, tree, cov, 0);
    if (tree.nodes.size() != node_count) throw FormatError("node count mismatch");
    loaded.tree = std::move(tree);
  } else {
    BallTree tree;
    tree.dim = h.dim;
    tree.num_docs = h.num_docs;
    tree.leaf_capacity = h.build.leaf_capacity;
    tree.seed = h.build.rng_seed;
    tree.nodes.reserve(node_count);
    read_ball_node(r, tree, cov, 0);
    if (tree.nodes.size() != node_count) throw FormatError("node count mismatch");
    loaded.tree = std::move(tree);
  }
  cov.require_complete();
  if (!r.at_end()) throw FormatError("trailing bytes after tree");
  return loaded;
}

LoadedIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open index file '" + path.string() + "'");
  return load_index(in);
}

void check_corpus(const IndexHeader& header, const Corpus& corpus) {
  if (header.num_docs != corpus.size() || header.dim != corpus.dim() ||
      header.corpus_fingerprint != corpus.fingerprint())
    throw FormatError("index was built from a different corpus");
  if (!std::equal(header.idf.begin(), header.idf.end(), corpus.idf().begin(), corpus.idf().end()))
    throw FormatError("index idf table does not match the corpus");
}

}  // namespace pivotree
