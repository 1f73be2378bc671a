#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subsearch/embedding.hpp"
#include "subsearch/geometry.hpp"

namespace subsearch {

enum class RegionSource { detector, static_grid, whole_frame, annotation_crop };

std::string_view to_string(RegionSource s);
RegionSource parse_region_source(std::string_view s);

struct RegionRecord {
  std::string region_id;
  Rect rect;
  std::size_t embedding_row = 0;
  RegionSource source = RegionSource::detector;

  friend bool operator==(const RegionRecord&, const RegionRecord&) = default;
};

struct ImageRecord {
  std::string image_id;
  int frame_width_px = 0;
  int frame_height_px = 0;
  std::size_t frame_embedding_row = 0;
  std::vector<RegionRecord> regions;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

/// The searchable database. Immutable once built; concurrent readers are safe.
struct IndexedCollection {
  EmbeddingMatrix embeddings;
  std::vector<ImageRecord> images;

  std::size_t dim() const { return embeddings.dim(); }
  std::size_t region_count() const;

  /// Index of the image with `image_id`, if present.
  std::optional<std::size_t> find_image(std::string_view image_id) const;

  /// Checks ids, rects, row references and row norms (within 1e-4).
  /// Throws InvalidArgument describing the first violation.
  void validate() const;

  friend bool operator==(const IndexedCollection&,
                         const IndexedCollection&) = default;
};

/// One query of the evaluation set: text + rectangle on a target frame.
struct Annotation {
  std::string query_id;
  std::string target_image_id;
  Rect rect;
  std::string text_short;
  std::string text_long;
  bool skippable = false;
  std::optional<EmbeddingVector> embedding_short;
  std::optional<EmbeddingVector> embedding_long;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// Copy of `coll` in which every image has exactly one full-frame region
/// (source whole_frame) backed by its frame embedding. Ranking this with
/// distance kind none and the full frame as query rect is the region-unaware
/// whole-image baseline.
IndexedCollection whole_frame_collection(const IndexedCollection& coll);

/// Four corner quadrants plus a centered half-size cell, ordered
/// TL, TR, BL, BR, C.
std::vector<Rect> static_grid_5();

/// rows x cols equal tiles in row-major order.
std::vector<Rect> uniform_grid(int rows, int cols);

enum class CandidateMode { all_overlap, best_iou_per_image };

std::string_view to_string(CandidateMode m);
CandidateMode parse_candidate_mode(std::string_view s);

/// Position of a region inside an IndexedCollection.
struct RegionRef {
  std::size_t image = 0;
  std::size_t region = 0;

  friend bool operator==(const RegionRef&, const RegionRef&) = default;
};

/// Regions whose rect has positive-area overlap with `query`.
///
/// all_overlap returns every such region; best_iou_per_image keeps, per
/// image, the one with the highest IoU (ties: smallest region_id). Output is
/// sorted by (image_id, region_id).
std::vector<RegionRef> candidate_regions(const IndexedCollection& coll,
                                         const Rect& query,
                                         CandidateMode mode);

}  // namespace subsearch
