#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pivotree/sparse_vector.hpp"

namespace pivotree {

/// Bag-of-words input for one document: (term, raw count) pairs.
struct RawDocument {
  std::string id;
  std::vector<std::pair<std::string, std::uint64_t>> counts;
};

/// Term string <-> term index mapping, indices assigned by first appearance.
class Vocabulary {
 public:
  /// Returns the index of `term`, appending it if unseen.
  TermIndex intern(std::string_view term);
  std::optional<TermIndex> find(std::string_view term) const;

  std::size_t size() const noexcept { return terms_.size(); }
  const std::string& term(TermIndex idx) const { return terms_.at(idx); }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermIndex> lookup_;
};

/**
 * @brief An immutable collection of unit-norm document vectors sharing one term space.
 *
 * Built either from raw counts (`tfidf_weigh`, which also records the vocabulary and
 * idf table needed to weigh query text) or from already weighted vectors
 * (`Corpus::from_weighted`, which has neither).
 */
class Corpus {
 public:
  static Corpus from_weighted(std::size_t dim,
                              std::vector<std::pair<std::string, SparseVector>> docs);

  std::size_t size() const noexcept { return vectors_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  const std::string& id(std::size_t doc) const { return ids_.at(doc); }
  const SparseVector& vector(std::size_t doc) const { return vectors_.at(doc); }
  std::span<const SparseVector> vectors() const noexcept { return vectors_; }
  std::span<const std::string> ids() const noexcept { return ids_; }
  std::optional<std::size_t> find(std::string_view doc_id) const;

  bool has_vocabulary() const noexcept { return !idf_.empty(); }
  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  std::span<const double> idf() const noexcept { return idf_; }

  /// Weighs query term counts with the corpus idf table and normalizes; unknown
  /// terms are dropped. Throws InvalidArgument when nothing remains.
  SparseVector weigh_query(std::span<const std::pair<std::string, std::uint64_t>> counts) const;

  /// FNV-1a digest over ids and the exact bits of every weight.
  std::uint64_t fingerprint() const noexcept;

  friend Corpus tfidf_weigh(std::span<const RawDocument> raw);

 private:
  Corpus(std::size_t dim, std::vector<std::string> ids, std::vector<SparseVector> vectors,
         Vocabulary vocab, std::vector<double> idf);

  std::size_t dim_;
  std::vector<std::string> ids_;
  std::vector<SparseVector> vectors_;
  std::unordered_map<std::string, std::size_t> id_lookup_;
  Vocabulary vocab_;
  std::vector<double> idf_;
};

/// Smoothed inverse document frequency, ln((1 + N) / (1 + df)) + 1.
double smoothed_idf(std::size_t num_docs, std::size_t doc_freq) noexcept;

/**
 * Weighs raw counts as tf * idf (tf = raw count, idf = `smoothed_idf`) and normalizes
 * every document to unit length. Throws InvalidArgument for an empty input, a
 * non-positive count, a duplicate id, or a document with no weighted terms.
 */
Corpus tfidf_weigh(std::span<const RawDocument> raw);

}  // namespace pivotree
