#include "pivotree/corpus.hpp"

#include <bit>
#include <cmath>

#include "pivotree/errors.hpp"

namespace pivotree {

TermIndex Vocabulary::intern(std::string_view term) {
  auto it = lookup_.find(std::string(term));
  if (it != lookup_.end()) return it->second;
  const auto idx = static_cast<TermIndex>(terms_.size());
  terms_.emplace_back(term);
  lookup_.emplace(terms_.back(), idx);
  return idx;
}

std::optional<TermIndex> Vocabulary::find(std::string_view term) const {
  auto it = lookup_.find(std::string(term));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

Corpus::Corpus(std::size_t dim, std::vector<std::string> ids, std::vector<SparseVector> vectors,
               Vocabulary vocab, std::vector<double> idf)
    : dim_(dim),
      ids_(std::move(ids)),
      vectors_(std::move(vectors)),
      vocab_(std::move(vocab)),
      idf_(std::move(idf)) {
  if (ids_.empty()) throw InvalidArgument("corpus must contain at least one document");
  id_lookup_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (vectors_[i].dim() != dim_) throw DimensionMismatch(dim_, vectors_[i].dim());
    if (!id_lookup_.emplace(ids_[i], i).second)
      throw InvalidArgument("duplicate doc_id '" + ids_[i] + "'");
  }
}

Corpus Corpus::from_weighted(std::size_t dim,
                             std::vector<std::pair<std::string, SparseVector>> docs) {
  std::vector<std::string> ids;
  std::vector<SparseVector> vectors;
  ids.reserve(docs.size());
  vectors.reserve(docs.size());
  for (auto& [id, vec] : docs) {
    if (vec.empty()) throw InvalidArgument("cannot normalize empty document '" + id + "'");
    // Unit input is kept bit-for-bit.
    const double n2 = norm_sq(vec);
    vectors.push_back(std::abs(n2 - 1.0) <= 1e-12 ? std::move(vec) : normalize(vec));
    ids.push_back(std::move(id));
  }
  return Corpus(dim, std::move(ids), std::move(vectors), Vocabulary{}, {});
}

std::optional<std::size_t> Corpus::find(std::string_view doc_id) const {
  auto it = id_lookup_.find(std::string(doc_id));
  if (it == id_lookup_.end()) return std::nullopt;
  return it->second;
}

SparseVector Corpus::weigh_query(
    std::span<const std::pair<std::string, std::uint64_t>> counts) const {
  if (!has_vocabulary())
    throw InvalidArgument("corpus was loaded pre-weighted and has no vocabulary");
  std::vector<std::pair<TermIndex, double>> entries;
  for (const auto& [term, count] : counts) {
    if (auto idx = vocab_.find(term))
      entries.emplace_back(*idx, static_cast<double>(count) * idf_[*idx]);
  }
  auto vec = SparseVector::from_entries(dim_, std::move(entries));
  if (vec.empty()) throw InvalidArgument("query has no terms in the corpus vocabulary");
  return normalize(vec);
}

std::uint64_t Corpus::fingerprint() const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(dim_);
  for (std::size_t d = 0; d < ids_.size(); ++d) {
    for (unsigned char c : ids_[d]) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    mix(vectors_[d].nnz());
    for (TermIndex idx : vectors_[d].indices()) mix(idx);
    for (double w : vectors_[d].weights()) mix(std::bit_cast<std::uint64_t>(w));
  }
  return h;
}

double smoothed_idf(std::size_t num_docs, std::size_t doc_freq) noexcept {
  return std::log((1.0 + static_cast<double>(num_docs)) / (1.0 + static_cast<double>(doc_freq))) +
         1.0;
}

Corpus tfidf_weigh(std::span<const RawDocument> raw) {
  if (raw.empty()) throw InvalidArgument("corpus must contain at least one document");

  Vocabulary vocab;
  std::vector<std::size_t> doc_freq;
  std::vector<std::vector<std::pair<TermIndex, double>>> tf(raw.size());
  std::vector<std::size_t> last_seen;  // last doc that counted toward df, +1

  for (std::size_t d = 0; d < raw.size(); ++d) {
    for (const auto& [term, count] : raw[d].counts) {
      if (count == 0)
        throw InvalidArgument("document '" + raw[d].id + "' has a non-positive count for '" +
                              term + "'");
      const TermIndex idx = vocab.intern(term);
      if (idx == doc_freq.size()) {
        doc_freq.push_back(0);
        last_seen.push_back(0);
      }
      if (last_seen[idx] != d + 1) {
        last_seen[idx] = d + 1;
        ++doc_freq[idx];
      }
      tf[d].emplace_back(idx, static_cast<double>(count));
    }
  }

  const std::size_t dim = std::max<std::size_t>(vocab.size(), 1);
  std::vector<double> idf(vocab.size());
  for (std::size_t t = 0; t < idf.size(); ++t) idf[t] = smoothed_idf(raw.size(), doc_freq[t]);

  std::vector<std::string> ids;
  std::vector<SparseVector> vectors;
  ids.reserve(raw.size());
  vectors.reserve(raw.size());
  for (std::size_t d = 0; d < raw.size(); ++d) {
    for (auto& [idx, w] : tf[d]) w *= idf[idx];
    auto vec = SparseVector::from_entries(dim, std::move(tf[d]));
    if (vec.empty())
      throw InvalidArgument("document '" + raw[d].id + "' has no weighted terms");
    vectors.push_back(normalize(vec));
    ids.push_back(raw[d].id);
  }
  return Corpus(dim, std::move(ids), std::move(vectors), std::move(vocab), std::move(idf));
}

}  // namespace pivotree
