#include "subsearch/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "subsearch/error.hpp"

namespace subsearch {

std::string_view to_string(DistanceKind k) {
  switch (k) {
    case DistanceKind::none:
      return "none";
    case DistanceKind::ad:
      return "ad";
    case DistanceKind::sd:
      return "sd";
    case DistanceKind::cd:
      return "cd";
    case DistanceKind::iou:
      return "iou";
  }
  return "none";
}

std::string_view to_string(Fusion f) {
  return f == Fusion::linear ? "linear" : "geometric_mean";
}

DistanceKind parse_distance_kind(std::string_view s) {
  if (s == "none" || s == "semantic") return DistanceKind::none;
  if (s == "ad") return DistanceKind::ad;
  if (s == "sd") return DistanceKind::sd;
  if (s == "cd") return DistanceKind::cd;
  if (s == "iou") return DistanceKind::iou;
  throw InvalidArgument("unknown distance kind '" + std::string(s) + "'");
}

Fusion parse_fusion(std::string_view s) {
  if (s == "linear") return Fusion::linear;
  if (s == "geometric_mean" || s == "geometric") return Fusion::geometric_mean;
  throw InvalidArgument("unknown fusion '" + std::string(s) + "'");
}

void RankingConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("alpha must lie in [0, 1]");
  }
}

std::string RankingConfig::describe() const {
  std::ostringstream os;
  os << to_string(distance_kind) << '/' << to_string(fusion) << '/' << alpha
     << '/' << to_string(candidate_mode);
  return os.str();
}

std::optional<std::size_t> RankedList::rank_of(std::string_view image_id) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].image_id == image_id) return i + 1;
  }
  return std::nullopt;
}

double rect_distance(DistanceKind kind, const Rect& a, const Rect& b) {
  switch (kind) {
    case DistanceKind::none:
      return 0.0;
    case DistanceKind::ad:
      return area_distance(a, b);
    case DistanceKind::sd:
      return shape_distance(a, b);
    case DistanceKind::cd:
      return centroid_distance(a, b);
    case DistanceKind::iou:
      return iou_distance(a, b);
  }
  return 0.0;
}

std::vector<double> standardize(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("cannot standardize empty list");
  std::vector<double> z(values.size(), 0.0);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) return z;

  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0)) return z;
  for (std::size_t i = 0; i < values.size(); ++i) {
    z[i] = (values[i] - mean) / sd;
  }
  return z;
}

double fuse_linear(double clip_z, double rect_z, double alpha) {
  return (1.0 - alpha) * clip_z + alpha * rect_z;
}

double fuse_geometric(double clip_z, double rect_z, double alpha,
                      double min_clip_z, double min_rect_z) {
  const double p = clip_z - min_clip_z + kGeometricFusionEpsilon;
  const double q = rect_z - min_rect_z + kGeometricFusionEpsilon;
  return std::pow(p, 1.0 - alpha) * std::pow(q, alpha);
}

double rank_key(double combined) {
  return std::round(combined * (1.0 / kScoreResolution));
}

namespace {

struct Scored {
  RegionRef ref;
  double semantic = 0.0;
  double geometric = 0.0;
  double combined = 0.0;
};

}  // namespace

RankedList rank_images(const IndexedCollection& coll,
                       std::span<const float> query_embedding,
                       const Rect& query, const RankingConfig& cfg) {
  if (coll.images.empty()) throw InvalidArgument("empty collection");
  if (query_embedding.size() != coll.dim()) {
    throw InvalidArgument("embedding dim mismatch: query " +
                          std::to_string(query_embedding.size()) +
                          ", index " + std::to_string(coll.dim()));
  }
  cfg.validate();

  const auto candidates = candidate_regions(coll, query, cfg.candidate_mode);
  const bool use_geometry = cfg.distance_kind != DistanceKind::none;

  std::vector<Scored> scored(candidates.size());
  std::vector<double> sem(candidates.size());
  std::vector<double> geo(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto& reg = coll.images[candidates[c].image].regions[candidates[c].region];
    scored[c].ref = candidates[c];
    sem[c] = semantic_distance(coll.embeddings.row(reg.embedding_row),
                               query_embedding);
    geo[c] = use_geometry ? rect_distance(cfg.distance_kind, reg.rect, query)
                          : 0.0;
    scored[c].semantic = sem[c];
    scored[c].geometric = geo[c];
  }

  if (!candidates.empty()) {
    const auto sem_z = standardize(sem);
    if (!use_geometry) {
      for (std::size_t c = 0; c < scored.size(); ++c) {
        scored[c].combined = sem_z[c];
      }
    } else {
      const auto geo_z = standardize(geo);
      if (cfg.fusion == Fusion::linear) {
        for (std::size_t c = 0; c < scored.size(); ++c) {
          scored[c].combined = fuse_linear(sem_z[c], geo_z[c], cfg.alpha);
        }
      } else {
        const double min_sem = *std::min_element(sem_z.begin(), sem_z.end());
        const double min_geo = *std::min_element(geo_z.begin(), geo_z.end());
        for (std::size_t c = 0; c < scored.size(); ++c) {
          scored[c].combined =
              fuse_geometric(sem_z[c], geo_z[c], cfg.alpha, min_sem, min_geo);
        }
      }
    }
  }

  // Best candidate per image. Candidates arrive sorted by (image_id,
  // region_id), so a strict '<' keeps the smallest region_id on ties.
  std::vector<const Scored*> best(coll.images.size(), nullptr);
  for (const auto& s : scored) {
    const Scored*& slot = best[s.ref.image];
    if (slot == nullptr || rank_key(s.combined) < rank_key(slot->combined)) {
      slot = &s;
    }
  }

  RankedList out;
  out.entries.reserve(coll.images.size());
  std::vector<RankedEntry> unmatched;
  for (std::size_t i = 0; i < coll.images.size(); ++i) {
    const auto& img = coll.images[i];
    RankedEntry e;
    e.image_id = img.image_id;
    if (const Scored* s = best[i]) {
      const auto& reg = img.regions[s->ref.region];
      e.best_region_id = reg.region_id;
      e.region_rect = reg.rect;
      e.combined = s->combined;
      e.semantic = s->semantic;
      if (use_geometry) e.geometric = s->geometric;
      e.matched = true;
      out.entries.push_back(std::move(e));
    } else {
      unmatched.push_back(std::move(e));
    }
  }

  std::sort(out.entries.begin(), out.entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              const double ka = rank_key(a.combined);
              const double kb = rank_key(b.combined);
              if (ka != kb) return ka < kb;
              return a.image_id < b.image_id;
            });
  std::sort(unmatched.begin(), unmatched.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              return a.image_id < b.image_id;
            });
  for (auto& e : unmatched) out.entries.push_back(std::move(e));
  return out;
}

RankedList theoretical_rank(const EmbeddingMatrix& crop_embeddings,
                            std::span<const std::string> image_ids,
                            std::span<const float> query_embedding) {
  if (crop_embeddings.rows() != image_ids.size()) {
    throw InvalidArgument("crop rows (" +
                          std::to_string(crop_embeddings.rows()) +
                          ") do not match image ids (" +
                          std::to_string(image_ids.size()) + ")");
  }
  const auto sims = score_rows(crop_embeddings, query_embedding);

  RankedList out;
  out.entries.resize(image_ids.size());
  for (std::size_t i = 0; i < image_ids.size(); ++i) {
    auto& e = out.entries[i];
    e.image_id = image_ids[i];
    e.semantic = 1.0 - sims[i];
    e.combined = e.semantic;
    e.matched = true;
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              const double ka = rank_key(a.combined);
              const double kb = rank_key(b.combined);
              if (ka != kb) return ka < kb;
              return a.image_id < b.image_id;
            });
  return out;
}

}  // namespace subsearch
