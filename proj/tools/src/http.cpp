#include "subsearch/tools/http.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

namespace subsearch::tools {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::pair<const char*, const char*>, 5> kImageTypes = {{
    {".jpg", "image/jpeg"},
    {".jpeg", "image/jpeg"},
    {".png", "image/png"},
    {".webp", "image/webp"},
    {".bmp", "image/bmp"},
}};

const char* content_type_for(const fs::path& p) {
  const std::string ext = p.extension().string();
  for (const auto& [e, type] : kImageTypes) {
    if (ext == e) return type;
  }
  return "application/octet-stream";
}

}  // namespace

HttpTextEmbedder::HttpTextEmbedder(std::string base_url)
    : base_url_(std::move(base_url)) {}

std::vector<float> HttpTextEmbedder::embed(const std::string& text) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(2, 0);
  client.set_read_timeout(30, 0);
  const std::string body = json{{"text", text}}.dump();
  auto res = client.Post("/v1/embed", body, "application/json");
  if (!res) {
    throw EmbedServiceError("unreachable (" + httplib::to_string(res.error()) +
                            ")");
  }
  if (res->status != 200) {
    throw EmbedServiceError("status " + std::to_string(res->status));
  }
  try {
    const json j = json::parse(res->body);
    auto vec = j.at("vector").get<std::vector<float>>();
    if (j.contains("dim") && j["dim"].get<std::size_t>() != vec.size()) {
      throw EmbedServiceError("advertised dim does not match vector length");
    }
    return vec;
  } catch (const json::exception& e) {
    throw EmbedServiceError(std::string("bad response: ") + e.what());
  }
}

std::optional<fs::path> find_image_file(const fs::path& dir,
                                        const std::string& image_id) {
  for (const auto& [ext, type] : kImageTypes) {
    fs::path candidate = dir / (image_id + ext);
    std::error_code ec;
    if (fs::is_regular_file(candidate, ec)) return candidate;
  }
  return std::nullopt;
}

void register_routes(httplib::Server& server, const SearchService& service,
                     const ServerOptions& options) {
  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });

  server.Get("/v1/meta", [&service](const httplib::Request&,
                                    httplib::Response& res) {
    const ApiResponse r = service.meta();
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  });

  server.Post("/v1/search", [&service](const httplib::Request& req,
                                       httplib::Response& res) {
    const ApiResponse r = service.search(req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  });

  const auto images_dir = options.images_dir;
  server.Get(R"(/v1/images/([^/]+))", [&service, images_dir](
                                          const httplib::Request& req,
                                          httplib::Response& res) {
    const std::string id = req.matches[1];
    // Only ids known to the index are served, which also rules out paths.
    if (!images_dir || !service.collection().find_image(id)) {
      res.status = 404;
      res.set_content(error_body("unknown image"), "application/json");
      return;
    }
    const auto file = find_image_file(*images_dir, id);
    if (!file) {
      res.status = 404;
      res.set_content(error_body("image file not found"), "application/json");
      return;
    }
    std::ifstream in(*file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    res.set_content(ss.str(), content_type_for(*file));
  });
}

}  // namespace subsearch::tools
