#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pivotree/corpus.hpp"
#include "pivotree/sparse_vector.hpp"

namespace pivotree {

enum class CorpusFormat { raw, weighted };

/**
 * @brief Contents of a line-oriented corpus file.
 *
 *     #format raw|weighted     (optional, defaults to raw)
 *     #dim N                   (optional, weighted only)
 *     doc_id<TAB>term:count term:count ...
 *     doc_id<TAB>index:weight index:weight ...
 *
 * Other lines starting with '#' and blank lines are ignored. When a line has no tab the id
 * ends at the first whitespace.
 */
struct CorpusFile {
  CorpusFormat format = CorpusFormat::raw;
  std::optional<std::size_t> dim;
  std::vector<std::string> comments;  ///< other '#' lines, without the '#'
  std::vector<RawDocument> raw;
  std::vector<std::pair<std::string, SparseVector>> weighted;
};

/// Throws ParseError (with the line number) on malformed input or duplicate ids.
CorpusFile read_corpus_file(std::istream& in);

/// Raw files go through tfidf_weigh; weighted files are normalized only.
Corpus to_corpus(CorpusFile file);

Corpus parse_corpus(std::istream& in);
Corpus parse_corpus(const std::filesystem::path& path);

/// `comments` are written as '#' lines after the format line.
void write_raw_corpus(std::ostream& out, std::span<const RawDocument> docs,
                      std::span<const std::string> comments = {});
/// Weights printed with 17 significant digits, so parsing reproduces them exactly.
void write_weighted_corpus(std::ostream& out, const Corpus& corpus);

struct QuerySet {
  std::vector<std::string> ids;
  std::vector<SparseVector> vectors;
};

/// Reads queries in corpus file format and maps them into `corpus`'s term space.
QuerySet parse_queries(std::istream& in, const Corpus& corpus);
QuerySet parse_queries(const std::filesystem::path& path, const Corpus& corpus);

/**
 * Interprets a command-line query: a corpus doc_id, else a weighted line
 * ("index:weight ..."), else free text (tokens, optionally "term:count") weighed with the
 * corpus idf. Unknown terms are dropped. The result is unit-norm.
 */
SparseVector parse_query_text(std::string_view text, const Corpus& corpus);

}  // namespace pivotree
