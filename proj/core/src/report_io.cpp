#include "subsearch/report_io.hpp"

#include <json.hpp>

namespace subsearch {

using nlohmann::json;

std::string eval_reports_to_json(const std::vector<EvalReport>& reports,
                                 const RankingConfig& cfg,
                                 const EvaluateOptions& options) {
  json jreports = json::array();
  for (const auto& r : reports) {
    json recall = json::object();
    for (const auto& [k, v] : r.recall_at) recall[std::to_string(k)] = v;
    json per_query = json::array();
    for (const auto& q : r.per_query) {
      per_query.push_back(
          {{"query_id", q.query_id}, {"rank", q.rank}, {"matched", q.matched}});
    }
    jreports.push_back({{"subset", std::string(to_string(r.subset))},
                        {"config_fingerprint", r.config_fingerprint},
                        {"queries", r.per_query.size()},
                        {"recall_at", std::move(recall)},
                        {"mean_rank", r.mean_rank},
                        {"unmatched", r.unmatched},
                        {"per_query", std::move(per_query)}});
  }

  json perturbation = nullptr;
  if (options.perturbation) {
    const auto& p = *options.perturbation;
    perturbation = {{"sigma_shift_x", p.sigma_shift_x},
                    {"sigma_shift_y", p.sigma_shift_y},
                    {"sigma_area", p.sigma_area},
                    {"master_seed", p.master_seed}};
  }

  json doc = {
      {"config",
       {{"distance", std::string(to_string(cfg.distance_kind))},
        {"fusion", std::string(to_string(cfg.fusion))},
        {"alpha", cfg.alpha},
        {"candidate_mode", std::string(to_string(cfg.candidate_mode))}}},
      {"text_field", std::string(to_string(options.text_field))},
      {"perturbation", std::move(perturbation)},
      // Targets with no overlapping region are ranked after every matched
      // frame, in image_id order.
      {"unmatched_rank_policy", "appended_tail"},
      {"reports", std::move(jreports)}};
  return doc.dump(2) + "\n";
}

std::string diagnostics_to_json(const Diagnostics& d) {
  const json doc = {{"annotations", d.annotations},
                    {"mean_best_iou", d.mean_best_iou},
                    {"mean_regions_per_frame", d.mean_regions_per_frame},
                    {"mean_max_coverage", d.mean_max_coverage},
                    {"mean_candidate_union", d.mean_candidate_union}};
  return doc.dump(2) + "\n";
}

}  // namespace subsearch
