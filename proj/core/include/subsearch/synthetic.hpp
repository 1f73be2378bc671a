#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "subsearch/store.hpp"

namespace subsearch {

/// Parameters of a synthetic homogeneous collection: every embedding lies
/// near one shared direction, so semantics alone discriminate poorly.
struct SyntheticSpec {
  std::size_t images = 300;
  std::size_t min_regions = 3;
  std::size_t max_regions = 8;
  std::size_t dim = 32;
  /// Spread of region/frame embeddings around the shared direction.
  double region_spread = 0.25;
  /// Noise added to the target region embedding to form the query vector.
  double query_noise = 0.5;
  std::size_t queries = 100;
  double skippable_fraction = 0.5;
  double min_extent = 0.1;
  double max_extent = 0.6;
  std::uint64_t seed = 1;
};

struct SyntheticDataset {
  IndexedCollection collection;
  /// Each annotation's rect equals its target region's rect exactly; both
  /// embedding fields are set (the short one noisier).
  std::vector<Annotation> annotations;
};

SyntheticDataset make_homogeneous_dataset(const SyntheticSpec& spec);

}  // namespace subsearch
