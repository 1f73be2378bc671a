#include "subsearch/index_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace subsearch {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "matrix I/O assumes a little-endian host");

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IndexError(IndexErrorCode::io, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(const std::string& buf, std::size_t offset) {
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data() + offset);
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

json rect_to_json(const Rect& r) {
  return {{"left", r.left}, {"top", r.top}, {"width", r.width},
          {"height", r.height}};
}

Rect rect_from_json(const json& j) {
  return {j.at("left").get<double>(), j.at("top").get<double>(),
          j.at("width").get<double>(), j.at("height").get<double>()};
}

// Accepts either a normalized "rect" or a pixel "rect_px".
Rect read_rect_field(const json& obj, int frame_w, int frame_h,
                     const std::string& what) {
  Rect r;
  if (obj.contains("rect")) {
    r = rect_from_json(obj.at("rect"));
  } else if (obj.contains("rect_px")) {
    const json& p = obj.at("rect_px");
    if (frame_w <= 0 || frame_h <= 0) {
      throw IndexError(IndexErrorCode::malformed_manifest,
                       what + ": rect_px needs frame dimensions");
    }
    r = {p.at("left").get<double>() / frame_w,
         p.at("top").get<double>() / frame_h,
         p.at("width").get<double>() / frame_w,
         p.at("height").get<double>() / frame_h};
  } else {
    throw IndexError(IndexErrorCode::malformed_manifest, what + ": no rect");
  }
  if (!r.is_valid()) {
    throw IndexError(IndexErrorCode::malformed_manifest,
                     what + ": invalid rect " + to_string(r));
  }
  return r;
}

std::optional<EmbeddingVector> read_optional_embedding(const json& obj,
                                                       const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  auto values = obj.at(key).get<std::vector<float>>();
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw IndexError(IndexErrorCode::non_finite_value,
                       std::string("non-finite value in ") + key);
    }
  }
  return EmbeddingVector(std::move(values));
}

json optional_embedding_to_json(const std::optional<EmbeddingVector>& e) {
  if (!e) return nullptr;
  return json(std::vector<float>(e->values().begin(), e->values().end()));
}

}  // namespace

std::string_view to_string(IndexErrorCode code) {
  switch (code) {
    case IndexErrorCode::io:
      return "i/o error";
    case IndexErrorCode::bad_magic:
      return "bad magic";
    case IndexErrorCode::version_mismatch:
      return "version mismatch";
    case IndexErrorCode::row_count_mismatch:
      return "row-count mismatch";
    case IndexErrorCode::non_finite_value:
      return "non-finite value";
    case IndexErrorCode::dangling_embedding_row:
      return "dangling embedding row";
    case IndexErrorCode::malformed_manifest:
      return "malformed manifest";
  }
  return "index error";
}

IndexError::IndexError(IndexErrorCode code, const std::string& detail)
    : Error(std::string(to_string(code)) + ": " + detail), code_(code) {}

void write_embedding_matrix(const fs::path& path, const EmbeddingMatrix& m) {
  if (m.dim() > std::numeric_limits<std::uint32_t>::max() ||
      m.rows() > std::numeric_limits<std::uint32_t>::max()) {
    throw IndexError(IndexErrorCode::io, "matrix too large for u32 header");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IndexError(IndexErrorCode::io, "cannot write " + path.string());
  out.write(kMatrixMagic, sizeof(kMatrixMagic));
  write_u32(out, static_cast<std::uint32_t>(m.dim()));
  write_u32(out, static_cast<std::uint32_t>(m.rows()));
  const auto data = m.data();
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size_bytes()));
  if (!out) throw IndexError(IndexErrorCode::io, "short write " + path.string());
}

EmbeddingMatrix read_embedding_matrix(const fs::path& path) {
  const std::string buf = read_file(path);
  constexpr std::size_t kHeader = sizeof(kMatrixMagic) + 8;
  if (buf.size() < sizeof(kMatrixMagic) ||
      std::memcmp(buf.data(), kMatrixMagic, sizeof(kMatrixMagic)) != 0) {
    throw IndexError(IndexErrorCode::bad_magic, path.string());
  }
  if (buf.size() < kHeader) {
    throw IndexError(IndexErrorCode::row_count_mismatch,
                     "truncated header in " + path.string());
  }
  const std::uint32_t dim = read_u32(buf, 8);
  const std::uint32_t rows = read_u32(buf, 12);
  if (dim == 0) {
    throw IndexError(IndexErrorCode::malformed_manifest,
                     "zero dim in " + path.string());
  }
  const std::size_t expected =
      kHeader + static_cast<std::size_t>(dim) * rows * sizeof(float);
  if (buf.size() != expected) {
    throw IndexError(IndexErrorCode::row_count_mismatch,
                     path.string() + " holds " +
                         std::to_string(buf.size()) + " bytes, header implies " +
                         std::to_string(expected));
  }
  std::vector<float> data(static_cast<std::size_t>(dim) * rows);
  std::memcpy(data.data(), buf.data() + kHeader, data.size() * sizeof(float));
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw IndexError(IndexErrorCode::non_finite_value,
                       "row " + std::to_string(i / dim) + " of " +
                           path.string());
    }
  }
  return EmbeddingMatrix(dim, std::move(data));
}

std::string manifest_to_json(const IndexedCollection& coll,
                             std::string_view matrix_file) {
  json images = json::array();
  for (const auto& img : coll.images) {
    json regions = json::array();
    for (const auto& reg : img.regions) {
      regions.push_back({{"region_id", reg.region_id},
                         {"rect", rect_to_json(reg.rect)},
                         {"embedding_row", reg.embedding_row},
                         {"source", std::string(to_string(reg.source))}});
    }
    images.push_back({{"image_id", img.image_id},
                      {"frame_width_px", img.frame_width_px},
                      {"frame_height_px", img.frame_height_px},
                      {"frame_embedding_row", img.frame_embedding_row},
                      {"regions", std::move(regions)}});
  }
  json doc = {{"version", kManifestVersion},
              {"dim", coll.dim()},
              {"matrix_file", std::string(matrix_file)},
              {"images", std::move(images)}};
  return doc.dump(2) + "\n";
}

IndexedCollection collection_from_manifest(std::string_view manifest_json,
                                           EmbeddingMatrix matrix) {
  json doc;
  try {
    doc = json::parse(manifest_json);
  } catch (const json::parse_error& e) {
    throw IndexError(IndexErrorCode::malformed_manifest, e.what());
  }

  IndexedCollection coll;
  try {
    if (doc.at("version").get<int>() != kManifestVersion) {
      throw IndexError(IndexErrorCode::version_mismatch,
                       "manifest version " + doc.at("version").dump());
    }
    const auto dim = doc.at("dim").get<std::size_t>();
    if (dim != matrix.dim()) {
      throw IndexError(IndexErrorCode::malformed_manifest,
                       "manifest dim " + std::to_string(dim) +
                           " but matrix dim " + std::to_string(matrix.dim()));
    }
    const std::size_t n_rows = matrix.rows();
    auto check_row = [&](std::size_t row, const std::string& owner) {
      if (row >= n_rows) {
        throw IndexError(IndexErrorCode::dangling_embedding_row,
                         owner + " references row " + std::to_string(row) +
                             " of " + std::to_string(n_rows));
      }
    };

    for (const json& ji : doc.at("images")) {
      ImageRecord img;
      img.image_id = ji.at("image_id").get<std::string>();
      img.frame_width_px = ji.at("frame_width_px").get<int>();
      img.frame_height_px = ji.at("frame_height_px").get<int>();
      img.frame_embedding_row = ji.at("frame_embedding_row").get<std::size_t>();
      check_row(img.frame_embedding_row, "image '" + img.image_id + "'");
      for (const json& jr : ji.at("regions")) {
        RegionRecord reg;
        reg.region_id = jr.at("region_id").get<std::string>();
        const std::string owner = img.image_id + "/" + reg.region_id;
        reg.rect = read_rect_field(jr, img.frame_width_px,
                                   img.frame_height_px, owner);
        reg.embedding_row = jr.at("embedding_row").get<std::size_t>();
        check_row(reg.embedding_row, "region '" + owner + "'");
        reg.source = parse_region_source(
            jr.value("source", std::string("detector")));
        img.regions.push_back(std::move(reg));
      }
      coll.images.push_back(std::move(img));
    }
  } catch (const json::exception& e) {
    throw IndexError(IndexErrorCode::malformed_manifest, e.what());
  } catch (const IndexError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw IndexError(IndexErrorCode::malformed_manifest, e.what());
  }

  coll.embeddings = std::move(matrix);
  try {
    coll.validate();
  } catch (const InvalidArgument& e) {
    throw IndexError(IndexErrorCode::malformed_manifest, e.what());
  }
  return coll;
}

void save_index(const IndexedCollection& coll, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IndexError(IndexErrorCode::io,
                     "cannot create " + dir.string() + ": " + ec.message());
  }
  write_embedding_matrix(dir / kDefaultMatrixFileName, coll.embeddings);
  std::ofstream out(dir / kManifestFileName, std::ios::trunc);
  if (!out) throw IndexError(IndexErrorCode::io, "cannot write manifest");
  out << manifest_to_json(coll, kDefaultMatrixFileName);
}

IndexedCollection load_index(const fs::path& dir_or_manifest) {
  const fs::path manifest_path = fs::is_directory(dir_or_manifest)
                                     ? dir_or_manifest / kManifestFileName
                                     : dir_or_manifest;
  const std::string text = read_file(manifest_path);

  std::string matrix_file;
  try {
    matrix_file = json::parse(text).at("matrix_file").get<std::string>();
  } catch (const json::exception& e) {
    throw IndexError(IndexErrorCode::malformed_manifest, e.what());
  }
  EmbeddingMatrix matrix =
      read_embedding_matrix(manifest_path.parent_path() / matrix_file);
  return collection_from_manifest(text, std::move(matrix));
}

std::vector<Annotation> parse_annotations(std::string_view jsonl) {
  std::vector<Annotation> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    const std::size_t end = std::min(jsonl.find('\n', pos), jsonl.size());
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "annotations line " + std::to_string(line_no);
    try {
      const json j = json::parse(line);
      Annotation a;
      a.query_id = j.at("query_id").get<std::string>();
      a.target_image_id = j.at("target_image_id").get<std::string>();
      a.rect = read_rect_field(j, 0, 0, where);
      a.text_short = j.value("text_short", std::string());
      a.text_long = j.value("text_long", std::string());
      a.skippable = j.value("skippable", false);
      a.embedding_short = read_optional_embedding(j, "embedding_short");
      a.embedding_long = read_optional_embedding(j, "embedding_long");
      out.push_back(std::move(a));
    } catch (const json::exception& e) {
      throw IndexError(IndexErrorCode::malformed_manifest,
                       where + ": " + e.what());
    }
  }
  return out;
}

std::vector<Annotation> read_annotations(const fs::path& path) {
  return parse_annotations(read_file(path));
}

void write_annotations(const fs::path& path,
                       const std::vector<Annotation>& annotations) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IndexError(IndexErrorCode::io, "cannot write " + path.string());
  for (const auto& a : annotations) {
    const json j = {{"query_id", a.query_id},
                    {"target_image_id", a.target_image_id},
                    {"rect", rect_to_json(a.rect)},
                    {"text_short", a.text_short},
                    {"text_long", a.text_long},
                    {"skippable", a.skippable},
                    {"embedding_short", optional_embedding_to_json(a.embedding_short)},
                    {"embedding_long", optional_embedding_to_json(a.embedding_long)}};
    out << j.dump() << '\n';
  }
}

}  // namespace subsearch
