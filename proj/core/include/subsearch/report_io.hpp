#pragma once

#include <string>
#include <vector>

#include "subsearch/evaluation.hpp"

namespace subsearch {

/// JSON document for an evaluation run: the ranking config, text field,
/// optional perturbation and one report per subset. Per-query entries are
/// ordered by query_id.
std::string eval_reports_to_json(const std::vector<EvalReport>& reports,
                                 const RankingConfig& cfg,
                                 const EvaluateOptions& options);

std::string diagnostics_to_json(const Diagnostics& d);

}  // namespace subsearch
