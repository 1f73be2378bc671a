#include "subsearch/store.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "subsearch/error.hpp"

namespace subsearch {

std::string_view to_string(RegionSource s) {
  switch (s) {
    case RegionSource::detector:
      return "detector";
    case RegionSource::static_grid:
      return "static_grid";
    case RegionSource::whole_frame:
      return "whole_frame";
    case RegionSource::annotation_crop:
      return "annotation_crop";
  }
  return "detector";
}

RegionSource parse_region_source(std::string_view s) {
  if (s == "detector") return RegionSource::detector;
  if (s == "static_grid") return RegionSource::static_grid;
  if (s == "whole_frame") return RegionSource::whole_frame;
  if (s == "annotation_crop") return RegionSource::annotation_crop;
  throw InvalidArgument("unknown region source '" + std::string(s) + "'");
}

std::string_view to_string(CandidateMode m) {
  return m == CandidateMode::all_overlap ? "all_overlap"
                                         : "best_iou_per_image";
}

CandidateMode parse_candidate_mode(std::string_view s) {
  if (s == "all_overlap") return CandidateMode::all_overlap;
  if (s == "best_iou_per_image" || s == "best_iou") {
    return CandidateMode::best_iou_per_image;
  }
  throw InvalidArgument("unknown candidate mode '" + std::string(s) + "'");
}

std::size_t IndexedCollection::region_count() const {
  std::size_t n = 0;
  for (const auto& img : images) n += img.regions.size();
  return n;
}

std::optional<std::size_t> IndexedCollection::find_image(
    std::string_view image_id) const {
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].image_id == image_id) return i;
  }
  return std::nullopt;
}

void IndexedCollection::validate() const {
  const std::size_t n_rows = embeddings.rows();
  for (std::size_t r = 0; r < n_rows; ++r) {
    const double n = l2_norm(embeddings.row(r));
    if (!std::isfinite(n)) {
      throw InvalidArgument("non-finite embedding row " + std::to_string(r));
    }
    if (std::abs(n - 1.0) > 1e-4) {
      throw InvalidArgument("embedding row " + std::to_string(r) +
                            " is not normalized (norm " + std::to_string(n) +
                            ")");
    }
  }

  std::unordered_set<std::string> image_ids;
  for (const auto& img : images) {
    if (!image_ids.insert(img.image_id).second) {
      throw InvalidArgument("duplicate image_id '" + img.image_id + "'");
    }
    if (img.frame_width_px <= 0 || img.frame_height_px <= 0) {
      throw InvalidArgument("image '" + img.image_id +
                            "' has non-positive frame dimensions");
    }
    if (img.frame_embedding_row >= n_rows) {
      throw InvalidArgument("image '" + img.image_id +
                            "' references missing frame embedding row");
    }
    std::unordered_set<std::string> region_ids;
    for (const auto& reg : img.regions) {
      if (!region_ids.insert(reg.region_id).second) {
        throw InvalidArgument("duplicate region_id '" + reg.region_id +
                              "' in image '" + img.image_id + "'");
      }
      validate_rect(reg.rect, "region rect of '" + img.image_id + "/" +
                                  reg.region_id + "'");
      if (reg.embedding_row >= n_rows) {
        throw InvalidArgument("region '" + img.image_id + "/" +
                              reg.region_id +
                              "' references missing embedding row");
      }
    }
  }
}

IndexedCollection whole_frame_collection(const IndexedCollection& coll) {
  IndexedCollection out;
  out.embeddings = coll.embeddings;
  out.images.reserve(coll.images.size());
  for (const auto& img : coll.images) {
    ImageRecord copy = img;
    copy.regions = {{"frame", Rect::full_frame(), img.frame_embedding_row,
                     RegionSource::whole_frame}};
    out.images.push_back(std::move(copy));
  }
  return out;
}

std::vector<Rect> static_grid_5() {
  return {
      {0.0, 0.0, 0.5, 0.5},
      {0.5, 0.0, 0.5, 0.5},
      {0.0, 0.5, 0.5, 0.5},
      {0.5, 0.5, 0.5, 0.5},
      {0.25, 0.25, 0.5, 0.5},
  };
}

std::vector<Rect> uniform_grid(int rows, int cols) {
  if (rows < 1 || cols < 1) {
    throw InvalidArgument("grid dimensions must be >= 1");
  }
  std::vector<Rect> cells;
  cells.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      // Edges computed as ratios so adjacent tiles share them exactly.
      const double l = static_cast<double>(c) / cols;
      const double t = static_cast<double>(r) / rows;
      const double w = static_cast<double>(c + 1) / cols - l;
      const double h = static_cast<double>(r + 1) / rows - t;
      cells.push_back({l, t, w, h});
    }
  }
  return cells;
}

std::vector<RegionRef> candidate_regions(const IndexedCollection& coll,
                                         const Rect& query,
                                         CandidateMode mode) {
  std::vector<RegionRef> out;
  for (std::size_t i = 0; i < coll.images.size(); ++i) {
    const auto& regions = coll.images[i].regions;
    std::optional<std::size_t> best;
    double best_iou = -1.0;
    for (std::size_t j = 0; j < regions.size(); ++j) {
      const Rect& r = regions[j].rect;
      // Cheap interval rejection before the full overlap test.
      if (r.left >= query.right() || query.left >= r.right()) continue;
      if (!intersects(r, query)) continue;
      if (mode == CandidateMode::all_overlap) {
        out.push_back({i, j});
        continue;
      }
      const double v = iou(r, query);
      if (!best || v > best_iou ||
          (v == best_iou && regions[j].region_id < regions[*best].region_id)) {
        best = j;
        best_iou = v;
      }
    }
    if (best) out.push_back({i, *best});
  }
  std::sort(out.begin(), out.end(), [&](const RegionRef& a, const RegionRef& b) {
    const auto& ia = coll.images[a.image];
    const auto& ib = coll.images[b.image];
    if (ia.image_id != ib.image_id) return ia.image_id < ib.image_id;
    return ia.regions[a.region].region_id < ib.regions[b.region].region_id;
  });
  return out;
}

}  // namespace subsearch
