#pragma once

#include <cstddef>
#include <span>

namespace subsearch {

/// Percentage of ranks <= k. Throws InvalidArgument on empty input or k = 0.
double recall_at_k(std::span<const std::size_t> ranks, std::size_t k);

/// Arithmetic mean of the ranks (MNR). Throws on empty input.
double mean_rank(std::span<const std::size_t> ranks);

}  // namespace subsearch
