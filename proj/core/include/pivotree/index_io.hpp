#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <variant>
#include <vector>

#include "pivotree/ball_tree.hpp"
#include "pivotree/pivot_tree.hpp"
#include "pivotree/search.hpp"

namespace pivotree {

class Corpus;

enum class IndexType : std::uint8_t { mta = 1, mip = 2 };

inline constexpr std::uint32_t kIndexFormatVersion = 1;

struct IndexHeader {
  IndexType type = IndexType::mta;
  std::uint64_t dim = 0;
  std::uint64_t num_docs = 0;
  BuildConfig build;  ///< for MIP only leaf_capacity and rng_seed are meaningful
  BoundKind default_bound = BoundKind::safe;
  std::uint64_t corpus_fingerprint = 0;
  std::vector<double> idf;  ///< empty for pre-weighted corpora
};

struct LoadedIndex {
  IndexHeader header;
  std::variant<PivotTree, BallTree> tree;
};

IndexHeader make_header(const Corpus& corpus, const PivotTree& tree);
IndexHeader make_header(const Corpus& corpus, const BallTree& tree);

/**
 * Binary container: magic, version, header, pre-order node records, FNV-1a 64 checksum of
 * everything before it. Integers and IEEE doubles are little-endian, so reals round-trip
 * bit for bit.
 */
void save_index(std::ostream& out, const IndexHeader& header, const PivotTree& tree);
void save_index(std::ostream& out, const IndexHeader& header, const BallTree& tree);
void save_index(const std::filesystem::path& path, const IndexHeader& header,
                const PivotTree& tree);
void save_index(const std::filesystem::path& path, const IndexHeader& header,
                const BallTree& tree);

/// Throws FormatError on a bad magic, version, checksum, truncation or inconsistent tree.
LoadedIndex load_index(std::istream& in);
LoadedIndex load_index(const std::filesystem::path& path);

/// Throws FormatError unless `corpus` is the corpus the index was built from.
void check_corpus(const IndexHeader& header, const Corpus& corpus);

}  // namespace pivotree
