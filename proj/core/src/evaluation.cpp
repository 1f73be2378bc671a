#include "subsearch/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <thread>

#include "subsearch/error.hpp"
#include "subsearch/metrics.hpp"
#include "subsearch/random.hpp"

namespace subsearch {

std::string_view to_string(TextField f) {
  return f == TextField::short_text ? "short" : "long";
}

std::string_view to_string(Subset s) {
  switch (s) {
    case Subset::all:
      return "all";
    case Subset::skippable:
      return "skippable";
    case Subset::non_skippable:
      return "non_skippable";
  }
  return "all";
}

TextField parse_text_field(std::string_view s) {
  if (s == "short") return TextField::short_text;
  if (s == "long") return TextField::long_text;
  throw InvalidArgument("unknown text field '" + std::string(s) + "'");
}

namespace detail {

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < n; i += threads) fn(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

std::string config_fingerprint(const RankingConfig& cfg,
                               const EvaluateOptions& options) {
  std::ostringstream os;
  os.precision(17);
  os << cfg.describe() << '|' << to_string(options.text_field);
  if (options.perturbation) {
    const auto& p = *options.perturbation;
    os << "|perturb:" << p.sigma_shift_x << ',' << p.sigma_shift_y << ','
       << p.sigma_area << ',' << p.master_seed;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(os.str())));
  return buf;
}

const EmbeddingVector& query_embedding(const Annotation& a, TextField field) {
  const auto& e = field == TextField::short_text ? a.embedding_short
                                                 : a.embedding_long;
  if (!e) {
    throw InvalidArgument("annotation '" + a.query_id + "' has no " +
                          std::string(to_string(field)) + " embedding");
  }
  return *e;
}

std::vector<EvalReport> summarize(std::vector<QueryOutcome> outcomes,
                                  const std::string& fingerprint) {
  std::sort(outcomes.begin(), outcomes.end(),
            [](const QueryOutcome& a, const QueryOutcome& b) {
              return a.query_id < b.query_id;
            });
  std::vector<EvalReport> reports;
  for (Subset subset : {Subset::all, Subset::skippable, Subset::non_skippable}) {
    EvalReport r;
    r.subset = subset;
    r.config_fingerprint = fingerprint;
    for (const auto& q : outcomes) {
      if (subset == Subset::skippable && !q.skippable) continue;
      if (subset == Subset::non_skippable && q.skippable) continue;
      r.per_query.push_back(q);
      if (!q.matched) ++r.unmatched;
    }
    if (r.per_query.empty()) continue;
    std::vector<std::size_t> ranks;
    ranks.reserve(r.per_query.size());
    for (const auto& q : r.per_query) ranks.push_back(q.rank);
    for (std::size_t k : kRecallCutoffs) r.recall_at[k] = recall_at_k(ranks, k);
    r.mean_rank = mean_rank(ranks);
    reports.push_back(std::move(r));
  }
  return reports;
}

std::vector<QueryOutcome> evaluate_queries(
    const IndexedCollection& coll, const std::vector<Annotation>& annotations,
    std::span<const Rect> rects, const RankingConfig& cfg, TextField field,
    unsigned threads) {
  if (rects.size() != annotations.size()) {
    throw InvalidArgument("one query rect per annotation required");
  }
  cfg.validate();
  // Validate up front so that errors do not depend on scheduling.
  for (const auto& a : annotations) {
    if (!coll.find_image(a.target_image_id)) {
      throw InvalidArgument("annotation '" + a.query_id +
                            "' targets unknown image '" + a.target_image_id +
                            "'");
    }
    query_embedding(a, field);
  }

  std::vector<QueryOutcome> outcomes(annotations.size());
  detail::parallel_for(annotations.size(), threads, [&](std::size_t i) {
    const Annotation& a = annotations[i];
    const RankedList ranked =
        rank_images(coll, query_embedding(a, field).values(), rects[i], cfg);
    const std::size_t rank = *ranked.rank_of(a.target_image_id);
    outcomes[i] = {a.query_id, rank, ranked.entries[rank - 1].matched,
                   a.skippable, rects[i]};
  });
  return outcomes;
}

std::vector<EvalReport> evaluate(const IndexedCollection& coll,
                                 const std::vector<Annotation>& annotations,
                                 const RankingConfig& cfg,
                                 const EvaluateOptions& options) {
  if (annotations.empty()) throw InvalidArgument("no annotations to evaluate");
  std::vector<Rect> rects;
  rects.reserve(annotations.size());
  if (options.perturbation) options.perturbation->validate();
  for (const auto& a : annotations) {
    rects.push_back(options.perturbation
                        ? perturb_rect(a.rect, *options.perturbation, a.query_id)
                        : a.rect);
  }
  auto outcomes = evaluate_queries(coll, annotations, rects, cfg,
                                   options.text_field, options.threads);
  return summarize(std::move(outcomes), config_fingerprint(cfg, options));
}

std::vector<EvalReport> evaluate_theoretical(
    const std::vector<Annotation>& annotations, const CropProvider& crops,
    TextField field) {
  if (annotations.empty()) throw InvalidArgument("no annotations to evaluate");
  std::vector<QueryOutcome> outcomes;
  outcomes.reserve(annotations.size());
  for (const auto& a : annotations) {
    const CropSet set = crops(a);
    const RankedList ranked = theoretical_rank(
        set.embeddings, set.image_ids, query_embedding(a, field).values());
    const auto rank = ranked.rank_of(a.target_image_id);
    if (!rank) {
      throw InvalidArgument("crop set for '" + a.query_id +
                            "' lacks target image '" + a.target_image_id + "'");
    }
    outcomes.push_back({a.query_id, *rank, true, a.skippable, a.rect});
  }
  return summarize(std::move(outcomes),
                   "theoretical|" + std::string(to_string(field)));
}

Diagnostics diagnostics(const IndexedCollection& coll,
                        const std::vector<Annotation>& annotations) {
  Diagnostics d;
  if (!coll.images.empty()) {
    d.mean_regions_per_frame = static_cast<double>(coll.region_count()) /
                               static_cast<double>(coll.images.size());
  }
  d.annotations = annotations.size();
  if (annotations.empty()) return d;

  std::vector<Rect> rects;
  for (const auto& a : annotations) {
    const auto idx = coll.find_image(a.target_image_id);
    if (!idx) {
      throw InvalidArgument("annotation '" + a.query_id +
                            "' targets unknown image '" + a.target_image_id +
                            "'");
    }
    rects.clear();
    double best_iou = 0.0;
    for (const auto& reg : coll.images[*idx].regions) {
      best_iou = std::max(best_iou, iou(a.rect, reg.rect));
      rects.push_back(reg.rect);
    }
    d.mean_best_iou += best_iou;
    d.mean_max_coverage += max_coverage(a.rect, rects);

    double covered = 0.0;
    std::size_t frames = 0;
    for (const auto& img : coll.images) {
      rects.clear();
      for (const auto& reg : img.regions) {
        if (intersects(reg.rect, a.rect)) rects.push_back(reg.rect);
      }
      if (rects.empty()) continue;
      covered += union_area(rects);
      ++frames;
    }
    if (frames > 0) d.mean_candidate_union += covered / frames;
  }
  const double n = static_cast<double>(annotations.size());
  d.mean_best_iou /= n;
  d.mean_max_coverage /= n;
  d.mean_candidate_union /= n;
  return d;
}

}  // namespace subsearch
