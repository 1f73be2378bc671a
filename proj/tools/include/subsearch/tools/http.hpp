#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "subsearch/tools/search_api.hpp"

namespace httplib {
class Server;
}

namespace subsearch::tools {

/// TextEmbedder backed by the embed-service: POST {base_url}/v1/embed with
/// {"text": ...}, expecting {"dim": int, "vector": [float]}.
class HttpTextEmbedder : public TextEmbedder {
 public:
  explicit HttpTextEmbedder(std::string base_url);
  std::vector<float> embed(const std::string& text) override;

 private:
  std::string base_url_;
};

struct ServerOptions {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::optional<std::filesystem::path> images_dir;
};

/// Registers /v1/search, /v1/images/{id}, /v1/meta and /health on `server`.
/// `service` must outlive the server.
void register_routes(httplib::Server& server, const SearchService& service,
                     const ServerOptions& options);

/// Image file for `image_id` in `dir` (first of .jpg .jpeg .png .webp .bmp),
/// if any.
std::optional<std::filesystem::path> find_image_file(
    const std::filesystem::path& dir, const std::string& image_id);

}  // namespace subsearch::tools
