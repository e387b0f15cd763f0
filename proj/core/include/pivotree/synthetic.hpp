#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pivotree/corpus.hpp"

namespace pivotree {

/// Parameters of the Zipf bag-of-words generator.
struct SyntheticSpec {
  std::size_t docs = 1000;
  std::size_t vocab = 5000;
  std::size_t avg_len = 60;  ///< mean tokens per document; lengths are uniform in [avg/2, 3avg/2]
  std::uint64_t seed = 0;
  double zipf_exponent = 1.0;
  std::string id_prefix = "d";

  void validate() const;
};

/**
 * Draws documents whose tokens follow a Zipf law over terms "t0".."t{vocab-1}" (rank r has
 * probability proportional to 1 / (r + 1)^s). Output depends only on these parameters: the
 * sampler uses raw mt19937_64 output, not the implementation-defined std distributions.
 */
std::vector<RawDocument> generate_corpus(const SyntheticSpec& spec);

}  // namespace pivotree
