#include "subsearch/tools/search_api.hpp"

#include <algorithm>

#include <json.hpp>

namespace subsearch::tools {

using nlohmann::json;

namespace {

json rect_json(const Rect& r) {
  return {{"left", r.left}, {"top", r.top}, {"width", r.width},
          {"height", r.height}};
}

}  // namespace

std::string error_body(std::string_view message) {
  return json{{"error", std::string(message)}}.dump();
}

SearchRequest parse_search_request(std::string_view body,
                                   const SearchDefaults& defaults) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw RequestError(400, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw RequestError(400, "request must be a JSON object");

  SearchRequest req;
  req.ranking = defaults.ranking;
  req.top_k = defaults.top_k;
  try {
    const bool has_embedding = j.contains("embedding") && !j["embedding"].is_null();
    const bool has_text = j.contains("text") && !j["text"].is_null();
    if (has_embedding == has_text) {
      throw RequestError(400, "exactly one of 'embedding' or 'text' is required");
    }
    if (has_embedding) {
      req.embedding = j["embedding"].get<std::vector<float>>();
      if (req.embedding->empty()) throw RequestError(400, "empty embedding");
    } else {
      req.text = j["text"].get<std::string>();
      if (req.text->empty()) throw RequestError(400, "empty text");
    }

    if (!j.contains("rect")) throw RequestError(400, "missing 'rect'");
    const json& r = j["rect"];
    req.rect = {r.at("left").get<double>(), r.at("top").get<double>(),
                r.at("width").get<double>(), r.at("height").get<double>()};
    if (!req.rect.is_valid()) {
      throw RequestError(400, "invalid rect " + to_string(req.rect));
    }

    if (j.contains("distance_kind")) {
      req.ranking.distance_kind =
          parse_distance_kind(j["distance_kind"].get<std::string>());
    } else if (j.contains("distance")) {
      req.ranking.distance_kind =
          parse_distance_kind(j["distance"].get<std::string>());
    }
    if (j.contains("fusion")) {
      req.ranking.fusion = parse_fusion(j["fusion"].get<std::string>());
    }
    if (j.contains("alpha")) req.ranking.alpha = j["alpha"].get<double>();
    if (j.contains("candidate_mode")) {
      req.ranking.candidate_mode =
          parse_candidate_mode(j["candidate_mode"].get<std::string>());
    }
    if (j.contains("top_k")) {
      const auto k = j["top_k"].get<long long>();
      if (k < 1) throw RequestError(400, "top_k must be >= 1");
      req.top_k = static_cast<std::size_t>(k);
    }
    req.ranking.validate();
  } catch (const RequestError&) {
    throw;
  } catch (const json::exception& e) {
    throw RequestError(400, e.what());
  } catch (const InvalidArgument& e) {
    throw RequestError(400, e.what());
  }
  return req;
}

std::string ranked_list_to_json(const RankedList& ranked, std::size_t top_k) {
  json results = json::array();
  const std::size_t n = std::min(top_k, ranked.entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    const RankedEntry& e = ranked.entries[i];
    results.push_back(
        {{"image_id", e.image_id},
         {"region_id", e.matched ? json(e.best_region_id) : json(nullptr)},
         {"rect", e.region_rect ? rect_json(*e.region_rect) : json(nullptr)},
         {"rank", i + 1},
         {"combined", e.matched ? json(e.combined) : json(nullptr)},
         {"semantic", e.matched ? json(e.semantic) : json(nullptr)},
         {"geometric", e.geometric ? json(*e.geometric) : json(nullptr)},
         {"matched", e.matched}});
  }
  return json{{"results", std::move(results)},
              {"total_images", ranked.entries.size()}}
      .dump();
}

SearchService::SearchService(const IndexedCollection& coll,
                             SearchDefaults defaults,
                             std::shared_ptr<TextEmbedder> embedder)
    : coll_(coll), defaults_(defaults), embedder_(std::move(embedder)) {}

RankedList SearchService::run(const SearchRequest& request) const {
  std::vector<float> raw;
  if (request.embedding) {
    raw = *request.embedding;
  } else {
    if (!embedder_) throw RequestError(502, "no embed-service configured");
    try {
      raw = embedder_->embed(*request.text);
    } catch (const EmbedServiceError& e) {
      throw RequestError(502, std::string("embed-service: ") + e.what());
    }
  }
  if (raw.size() != coll_.dim()) {
    throw RequestError(422, "embedding dim " + std::to_string(raw.size()) +
                                " does not match index dim " +
                                std::to_string(coll_.dim()));
  }
  EmbeddingVector query;
  try {
    query = l2_normalize(raw);
  } catch (const InvalidArgument& e) {
    throw RequestError(request.embedding ? 400 : 502, e.what());
  }
  return rank_images(coll_, query.values(), request.rect, request.ranking);
}

ApiResponse SearchService::search(std::string_view body) const {
  try {
    const SearchRequest req = parse_search_request(body, defaults_);
    return {200, ranked_list_to_json(run(req), req.top_k)};
  } catch (const RequestError& e) {
    return {e.status(), error_body(e.what())};
  } catch (const InvalidArgument& e) {
    return {400, error_body(e.what())};
  }
}

ApiResponse SearchService::meta() const {
  const json doc = {
      {"dim", coll_.dim()},
      {"images", coll_.images.size()},
      {"regions", coll_.region_count()},
      {"distance_kinds", {"none", "ad", "sd", "cd", "iou"}},
      {"fusions", {"linear", "geometric_mean"}},
      {"candidate_modes", {"all_overlap", "best_iou_per_image"}},
      {"defaults",
       {{"distance_kind", std::string(to_string(defaults_.ranking.distance_kind))},
        {"fusion", std::string(to_string(defaults_.ranking.fusion))},
        {"alpha", defaults_.ranking.alpha},
        {"candidate_mode", std::string(to_string(defaults_.ranking.candidate_mode))},
        {"top_k", defaults_.top_k}}}};
  return {200, doc.dump()};
}

}  // namespace subsearch::tools
