#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subsearch/embedding.hpp"
#include "subsearch/error.hpp"
#include "subsearch/ranking.hpp"
#include "subsearch/store.hpp"

namespace subsearch::tools {

/// Defaults applied to fields a request leaves out.
struct SearchDefaults {
  RankingConfig ranking;
  std::size_t top_k = 100;
};

/// A search request: exactly one of embedding / text, plus the query rect.
struct SearchRequest {
  std::optional<std::vector<float>> embedding;
  std::optional<std::string> text;
  Rect rect;
  RankingConfig ranking;
  std::size_t top_k = 100;
};

/// Request rejected before ranking; carries the HTTP status to return.
class RequestError : public Error {
 public:
  RequestError(int status, const std::string& message)
      : Error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

/// Parses a JSON request body. Throws RequestError(400) on malformed input.
SearchRequest parse_search_request(std::string_view body,
                                   const SearchDefaults& defaults);

/// Turns query text into an embedding. Implementations throw
/// EmbedServiceError when the backing service cannot answer.
class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  virtual std::vector<float> embed(const std::string& text) = 0;
};

class EmbedServiceError : public Error {
 public:
  using Error::Error;
};

/// {"results": [...top_k entries...], "total_images": n}
std::string ranked_list_to_json(const RankedList& ranked, std::size_t top_k);

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Request handling over an immutable index, shared by the HTTP server and
/// the `query` subcommand. Safe for concurrent calls if the embedder is.
class SearchService {
 public:
  SearchService(const IndexedCollection& coll, SearchDefaults defaults,
                std::shared_ptr<TextEmbedder> embedder = nullptr);

  ApiResponse search(std::string_view body) const;
  ApiResponse meta() const;

  /// Ranking for an already parsed request. Throws RequestError.
  RankedList run(const SearchRequest& request) const;

  const IndexedCollection& collection() const { return coll_; }

 private:
  const IndexedCollection& coll_;
  SearchDefaults defaults_;
  std::shared_ptr<TextEmbedder> embedder_;
};

std::string error_body(std::string_view message);

}  // namespace subsearch::tools
