#include "subsearch/metrics.hpp"

#include <algorithm>

#include "subsearch/error.hpp"

namespace subsearch {

double recall_at_k(std::span<const std::size_t> ranks, std::size_t k) {
  if (ranks.empty()) throw InvalidArgument("recall of empty rank list");
  if (k == 0) throw InvalidArgument("k must be positive");
  const auto hits = std::count_if(ranks.begin(), ranks.end(),
                                  [k](std::size_t r) { return r <= k; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double mean_rank(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw InvalidArgument("mean rank of empty rank list");
  double sum = 0.0;
  for (std::size_t r : ranks) sum += static_cast<double>(r);
  return sum / static_cast<double>(ranks.size());
}

}  // namespace subsearch
