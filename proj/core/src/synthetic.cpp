#include "pivotree/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "pivotree/errors.hpp"

namespace pivotree {

void SyntheticSpec::validate() const {
  if (docs == 0) throw InvalidArgument("synthetic corpus needs at least one document");
  if (vocab == 0) throw InvalidArgument("synthetic vocabulary must be non-empty");
  if (avg_len == 0) throw InvalidArgument("average document length must be positive");
  if (!(zipf_exponent >= 0.0) || !std::isfinite(zipf_exponent))
    throw InvalidArgument("zipf exponent must be finite and non-negative");
}

namespace {

double unit_interval(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<RawDocument> generate_corpus(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<double> cdf(spec.vocab);
  double total = 0.0;
  for (std::size_t r = 0; r < spec.vocab; ++r) {
    total += std::pow(static_cast<double>(r + 1), -spec.zipf_exponent);
    cdf[r] = total;
  }
  for (double& c : cdf) c /= total;

  const std::size_t min_len = std::max<std::size_t>(1, spec.avg_len / 2);
  const std::size_t max_len = std::max(min_len, spec.avg_len + spec.avg_len / 2);

  std::mt19937_64 rng(spec.seed);
  std::vector<RawDocument> out;
  out.reserve(spec.docs);
  for (std::size_t d = 0; d < spec.docs; ++d) {
    const std::size_t len = min_len + static_cast<std::size_t>(rng() % (max_len - min_len + 1));
    RawDocument doc;
    doc.id = spec.id_prefix + std::to_string(d);
    std::unordered_map<std::size_t, std::size_t> slot;
    for (std::size_t t = 0; t < len; ++t) {
      const double u = unit_interval(rng);
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const auto rank = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()),
                                              spec.vocab - 1);
      auto [pos, inserted] = slot.emplace(rank, doc.counts.size());
      if (inserted)
        doc.counts.emplace_back("t" + std::to_string(rank), 1);
      else
        ++doc.counts[pos->second].second;
    }
    out.push_back(std::move(doc));
  }
  return out;
}

}  // namespace pivotree
