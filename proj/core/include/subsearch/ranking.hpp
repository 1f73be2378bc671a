#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subsearch/embedding.hpp"
#include "subsearch/geometry.hpp"
#include "subsearch/store.hpp"

namespace subsearch {

/// Geometric distance used alongside the semantic one. `none` ranks by
/// semantic distance alone.
enum class DistanceKind { none, ad, sd, cd, iou };
enum class Fusion { linear, geometric_mean };

std::string_view to_string(DistanceKind k);
std::string_view to_string(Fusion f);
DistanceKind parse_distance_kind(std::string_view s);
Fusion parse_fusion(std::string_view s);

struct RankingConfig {
  DistanceKind distance_kind = DistanceKind::iou;
  Fusion fusion = Fusion::linear;
  double alpha = 0.5;
  CandidateMode candidate_mode = CandidateMode::all_overlap;

  void validate() const;
  /// Stable text form, e.g. "iou/linear/0.5/all_overlap".
  std::string describe() const;

  friend bool operator==(const RankingConfig&, const RankingConfig&) = default;
};

struct RankedEntry {
  std::string image_id;
  /// Empty for unmatched images.
  std::string best_region_id;
  std::optional<Rect> region_rect;
  double combined = 0.0;
  /// Raw cosine distance of the chosen region (or crop).
  double semantic = 0.0;
  /// Raw geometric distance of the chosen region; absent for kind none.
  std::optional<double> geometric;
  bool matched = false;
};

/// One entry per image. Matched entries come first, ascending by combined
/// distance; unmatched ones follow in image_id order. Rank = index + 1.
struct RankedList {
  std::vector<RankedEntry> entries;

  /// 1-based rank of `image_id`, or nullopt if absent.
  std::optional<std::size_t> rank_of(std::string_view image_id) const;
};

/// Ordering resolution for combined scores. Scores are compared after
/// rounding to this grid, so values that differ only by floating-point noise
/// tie and fall back to the id tie-break.
inline constexpr double kScoreResolution = 1e-12;

/// Sort key of a combined score: round(combined / kScoreResolution).
double rank_key(double combined);

double rect_distance(DistanceKind kind, const Rect& a, const Rect& b);

/// z-scores with population std. Constant input (incl. a single value) maps
/// to all zeros. Throws InvalidArgument on empty input.
std::vector<double> standardize(std::span<const double> values);

inline constexpr double kGeometricFusionEpsilon = 1e-6;

double fuse_linear(double clip_z, double rect_z, double alpha);

/// Weighted geometric mean of the min-shifted standardized distances:
/// (clip_z - min_clip_z + eps)^(1 - alpha) * (rect_z - min_rect_z + eps)^alpha.
double fuse_geometric(double clip_z, double rect_z, double alpha,
                      double min_clip_z, double min_rect_z);

/// Ranks every image of `coll` for a query embedding constrained to `query`.
RankedList rank_images(const IndexedCollection& coll,
                       std::span<const float> query_embedding,
                       const Rect& query, const RankingConfig& cfg);

/// Upper-bound ranking over per-image crops of the query rectangle: row i of
/// `crop_embeddings` belongs to `image_ids[i]`.
RankedList theoretical_rank(const EmbeddingMatrix& crop_embeddings,
                            std::span<const std::string> image_ids,
                            std::span<const float> query_embedding);

}  // namespace subsearch
