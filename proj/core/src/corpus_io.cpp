#include "pivotree/corpus_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "pivotree/errors.hpp"

namespace pivotree {

namespace {

constexpr std::string_view kSpace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    i = s.find_first_not_of(kSpace, i);
    if (i == std::string_view::npos) break;
    auto j = s.find_first_of(kSpace, i);
    if (j == std::string_view::npos) j = s.size();
    out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

bool split_pair(std::string_view token, std::string_view& key, std::string_view& value) {
  const auto colon = token.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == token.size()) return false;
  key = token.substr(0, colon);
  value = token.substr(colon + 1);
  return true;
}

std::vector<std::pair<TermIndex, double>> parse_weighted_tokens(
    std::span<const std::string_view> tokens, std::optional<std::size_t> dim, std::size_t line) {
  std::vector<std::pair<TermIndex, double>> entries;
  std::unordered_set<TermIndex> seen;
  for (auto tok : tokens) {
    std::string_view key, value;
    TermIndex idx{};
    double w{};
    if (!split_pair(tok, key, value) || !parse_number(key, idx) || !parse_number(value, w))
      throw ParseError(line, "expected index:weight, got '" + std::string(tok) + "'");
    if (!std::isfinite(w)) throw ParseError(line, "non-finite weight in '" + std::string(tok) + "'");
    if (dim && idx >= *dim)
      throw ParseError(line, "term index " + std::to_string(idx) + " >= dim " +
                                 std::to_string(*dim));
    if (!seen.insert(idx).second)
      throw ParseError(line, "duplicate term index " + std::to_string(idx));
    if (w != 0.0) entries.emplace_back(idx, w);
  }
  return entries;
}

std::vector<std::pair<std::string, std::uint64_t>> parse_raw_tokens(
    std::span<const std::string_view> tokens, std::size_t line) {
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  for (auto tok : tokens) {
    std::string_view key, value;
    std::uint64_t count{};
    if (!split_pair(tok, key, value) || !parse_number(value, count) || count == 0)
      throw ParseError(line, "expected term:count with a positive count, got '" +
                                 std::string(tok) + "'");
    counts.emplace_back(std::string(key), count);
  }
  return counts;
}

}  // namespace

CorpusFile read_corpus_file(std::istream& in) {
  CorpusFile file;
  std::unordered_set<std::string> ids;
  std::vector<std::pair<std::string, std::vector<std::pair<TermIndex, double>>>> pending;
  std::vector<std::size_t> pending_lines;
  bool seen_doc = false;
  std::string buffer;
  std::size_t line = 0;

  while (std::getline(in, buffer)) {
    ++line;
    const std::string_view text = trim(buffer);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const auto parts = split_ws(text.substr(1));
      if (parts.empty()) continue;
      if (parts[0] == "format") {
        if (seen_doc) throw ParseError(line, "#format must precede the documents");
        if (parts.size() != 2) throw ParseError(line, "expected '#format raw|weighted'");
        if (parts[1] == "raw")
          file.format = CorpusFormat::raw;
        else if (parts[1] == "weighted")
          file.format = CorpusFormat::weighted;
        else
          throw ParseError(line, "unknown corpus format '" + std::string(parts[1]) + "'");
      } else if (parts[0] == "dim") {
        if (seen_doc) throw ParseError(line, "#dim must precede the documents");
        std::size_t dim{};
        if (parts.size() != 2 || !parse_number(parts[1], dim) || dim == 0)
          throw ParseError(line, "expected '#dim N' with N > 0");
        file.dim = dim;
      } else {
        file.comments.emplace_back(trim(text.substr(1)));
      }
      continue;
    }

    seen_doc = true;
    auto cut = text.find('\t');
    if (cut == std::string_view::npos) cut = text.find_first_of(kSpace);
    const std::string id(text.substr(0, cut));
    const auto tokens =
        split_ws(cut == std::string_view::npos ? std::string_view{} : text.substr(cut + 1));
    if (!ids.insert(id).second) throw ParseError(line, "duplicate doc_id '" + id + "'");
    if (tokens.empty()) throw ParseError(line, "document '" + id + "' has no terms");

    if (file.format == CorpusFormat::raw) {
      file.raw.push_back(RawDocument{id, parse_raw_tokens(tokens, line)});
    } else {
      auto entries = parse_weighted_tokens(tokens, file.dim, line);
      if (entries.empty()) throw ParseError(line, "document '" + id + "' has only zero weights");
      pending.emplace_back(id, std::move(entries));
      pending_lines.push_back(line);
    }
  }
  if (in.bad()) throw ParseError(0, "read error");

  if (file.format == CorpusFormat::weighted) {
    std::size_t dim = file.dim.value_or(0);
    if (!file.dim)
      for (const auto& [id, entries] : pending)
        for (const auto& [idx, w] : entries) dim = std::max<std::size_t>(dim, idx + std::size_t{1});
    for (std::size_t i = 0; i < pending.size(); ++i) {
      auto& [id, entries] = pending[i];
      file.weighted.emplace_back(std::move(id),
                                 SparseVector::from_entries(dim, std::move(entries)));
    }
    if (!file.dim) file.dim = dim;
  }
  return file;
}

Corpus to_corpus(CorpusFile file) {
  if (file.format == CorpusFormat::raw) {
    if (file.raw.empty()) throw ParseError(0, "corpus file contains no documents");
    return tfidf_weigh(file.raw);
  }
  if (file.weighted.empty()) throw ParseError(0, "corpus file contains no documents");
  return Corpus::from_weighted(*file.dim, std::move(file.weighted));
}

Corpus parse_corpus(std::istream& in) { return to_corpus(read_corpus_file(in)); }

Corpus parse_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file '" + path.string() + "'");
  return parse_corpus(in);
}

void write_raw_corpus(std::ostream& out, std::span<const RawDocument> docs,
                      std::span<const std::string> comments) {
  out << "#format raw\n";
  for (const auto& c : comments) out << '#' << c << '\n';
  for (const auto& doc : docs) {
    out << doc.id << '\t';
    for (std::size_t i = 0; i < doc.counts.size(); ++i) {
      if (i > 0) out << ' ';
      out << doc.counts[i].first << ':' << doc.counts[i].second;
    }
    out << '\n';
  }
}

void write_weighted_corpus(std::ostream& out, const Corpus& corpus) {
  out << "#format weighted\n#dim " << corpus.dim() << '\n';
  char buf[40];
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    out << corpus.id(d) << '\t';
    const auto& v = corpus.vector(d);
    for (std::size_t i = 0; i < v.nnz(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", v.weights()[i]);
      if (i > 0) out << ' ';
      out << v.indices()[i] << ':' << buf;
    }
    out << '\n';
  }
}

QuerySet parse_queries(std::istream& in, const Corpus& corpus) {
  CorpusFile file = read_corpus_file(in);
  QuerySet out;
  if (file.format == CorpusFormat::raw) {
    for (auto& doc : file.raw) {
      out.vectors.push_back(corpus.weigh_query(doc.counts));
      out.ids.push_back(std::move(doc.id));
    }
  } else {
    if (*file.dim > corpus.dim()) throw DimensionMismatch(corpus.dim(), *file.dim);
    for (auto& [id, vec] : file.weighted) {
      std::vector<std::pair<TermIndex, double>> entries;
      for (std::size_t i = 0; i < vec.nnz(); ++i)
        entries.emplace_back(vec.indices()[i], vec.weights()[i]);
      out.vectors.push_back(normalize(SparseVector::from_entries(corpus.dim(), std::move(entries))));
      out.ids.push_back(std::move(id));
    }
  }
  if (out.ids.empty()) throw ParseError(0, "query file contains no queries");
  return out;
}

QuerySet parse_queries(const std::filesystem::path& path, const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open query file '" + path.string() + "'");
  return parse_queries(in, corpus);
}

SparseVector parse_query_text(std::string_view text, const Corpus& corpus) {
  text = trim(text);
  if (text.empty()) throw InvalidArgument("empty query");
  if (auto doc = corpus.find(text)) return corpus.vector(*doc);

  const auto tokens = split_ws(text);
  bool weighted = true;
  for (auto tok : tokens) {
    std::string_view key, value;
    TermIndex idx{};
    double w{};
    if (!split_pair(tok, key, value) || !parse_number(key, idx) || !parse_number(value, w)) {
      weighted = false;
      break;
    }
  }
  if (weighted) {
    auto entries = parse_weighted_tokens(tokens, corpus.dim(), 0);
    auto vec = SparseVector::from_entries(corpus.dim(), std::move(entries));
    if (vec.empty()) throw InvalidArgument("query has only zero weights");
    return normalize(vec);
  }

  std::vector<std::pair<std::string, std::uint64_t>> counts;
  for (auto tok : tokens) {
    std::string_view key, value;
    std::uint64_t count{};
    if (split_pair(tok, key, value) && parse_number(value, count) && count > 0)
      counts.emplace_back(std::string(key), count);
    else
      counts.emplace_back(std::string(tok), 1);
  }
  return corpus.weigh_query(counts);
}

}  // namespace pivotree
