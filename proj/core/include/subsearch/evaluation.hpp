#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subsearch/embedding.hpp"
#include "subsearch/perturbation.hpp"
#include "subsearch/ranking.hpp"
#include "subsearch/store.hpp"

namespace subsearch {

enum class TextField { short_text, long_text };
enum class Subset { all, skippable, non_skippable };

std::string_view to_string(TextField f);
std::string_view to_string(Subset s);
TextField parse_text_field(std::string_view s);

/// The cutoffs reported for every evaluation.
inline constexpr std::size_t kRecallCutoffs[] = {1, 10, 100, 1000};

/// Outcome of one annotation query.
struct QueryOutcome {
  std::string query_id;
  /// 1-based rank of the target frame. Unmatched targets get their position
  /// in the appended tail (after all matched images).
  std::size_t rank = 0;
  bool matched = false;
  bool skippable = false;
  /// Rectangle actually used for the query (after perturbation, if any).
  Rect query_rect;
};

struct EvalReport {
  Subset subset = Subset::all;
  std::vector<QueryOutcome> per_query;  // sorted by query_id
  std::map<std::size_t, double> recall_at;  // k -> percentage
  double mean_rank = 0.0;
  std::size_t unmatched = 0;
  std::string config_fingerprint;
};

struct EvaluateOptions {
  TextField text_field = TextField::long_text;
  std::optional<PerturbationConfig> perturbation;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Fingerprint of everything that determines an evaluation's output.
std::string config_fingerprint(const RankingConfig& cfg,
                               const EvaluateOptions& options);

/// Embedding of `a` for the requested text field. Throws InvalidArgument if
/// it is missing.
const EmbeddingVector& query_embedding(const Annotation& a, TextField field);

/// Builds one report per non-empty subset, in the order all, skippable,
/// non_skippable, from per-query outcomes.
std::vector<EvalReport> summarize(std::vector<QueryOutcome> outcomes,
                                  const std::string& fingerprint);

/// Runs every annotation as a query (optionally perturbing its rectangle,
/// keyed by query_id) and reports the target frame's rank per subset.
std::vector<EvalReport> evaluate(const IndexedCollection& coll,
                                 const std::vector<Annotation>& annotations,
                                 const RankingConfig& cfg,
                                 const EvaluateOptions& options = {});

/// As evaluate(), but with the query rectangle of annotation i given by
/// `rects[i]`. Used by sweeps so that every config shares the same rects.
std::vector<QueryOutcome> evaluate_queries(
    const IndexedCollection& coll, const std::vector<Annotation>& annotations,
    std::span<const Rect> rects, const RankingConfig& cfg, TextField field,
    unsigned threads = 0);

/// Per-query crop set for the upper-bound baseline: one embedding per image
/// of the frame cropped to that query's rectangle.
struct CropSet {
  EmbeddingMatrix embeddings;
  std::vector<std::string> image_ids;
};

using CropProvider = std::function<CropSet(const Annotation&)>;

std::vector<EvalReport> evaluate_theoretical(
    const std::vector<Annotation>& annotations, const CropProvider& crops,
    TextField field);

/// Region-quality diagnostics for one collection against the annotations.
struct Diagnostics {
  std::size_t annotations = 0;
  /// Mean over annotations of the best IoU between the annotation and any
  /// region of its target frame.
  double mean_best_iou = 0.0;
  /// Mean number of regions per indexed frame.
  double mean_regions_per_frame = 0.0;
  /// Mean over annotations of the largest fraction of the annotation covered
  /// by a single region of the target frame.
  double mean_max_coverage = 0.0;
  /// Mean over annotations of the frame fraction covered by the union of a
  /// frame's regions that overlap the annotation, averaged over every frame
  /// with at least one such region.
  double mean_candidate_union = 0.0;
};

Diagnostics diagnostics(const IndexedCollection& coll,
                        const std::vector<Annotation>& annotations);

namespace detail {

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace detail

}  // namespace subsearch
