#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "subsearch/embedding.hpp"
#include "subsearch/error.hpp"
#include "subsearch/store.hpp"

namespace subsearch {

// On-disk layout of an index directory:
//
//   <dir>/manifest.json   JSON manifest (version 1)
//   <dir>/<matrix_file>   binary embedding matrix, default "embeddings.bin"
//
// Matrix file: "SUBEMB1\0" magic, u32 LE dim, u32 LE row count, then
// rows x dim float32 LE, row-major, no padding.

inline constexpr char kMatrixMagic[8] = {'S', 'U', 'B', 'E', 'M', 'B', '1', '\0'};
inline constexpr int kManifestVersion = 1;
inline constexpr std::string_view kManifestFileName = "manifest.json";
inline constexpr std::string_view kDefaultMatrixFileName = "embeddings.bin";

enum class IndexErrorCode {
  io,
  bad_magic,
  version_mismatch,
  row_count_mismatch,
  non_finite_value,
  dangling_embedding_row,
  malformed_manifest,
};

std::string_view to_string(IndexErrorCode code);

class IndexError : public Error {
 public:
  IndexError(IndexErrorCode code, const std::string& detail);
  IndexErrorCode code() const { return code_; }

 private:
  IndexErrorCode code_;
};

void write_embedding_matrix(const std::filesystem::path& path,
                            const EmbeddingMatrix& m);
EmbeddingMatrix read_embedding_matrix(const std::filesystem::path& path);

/// Writes manifest.json and the matrix file into `dir` (created if needed).
void save_index(const IndexedCollection& coll,
                const std::filesystem::path& dir);

/// Loads an index from a directory (or a manifest path) and validates it.
IndexedCollection load_index(const std::filesystem::path& dir_or_manifest);

/// Manifest JSON text for `coll`, referencing `matrix_file`.
std::string manifest_to_json(const IndexedCollection& coll,
                             std::string_view matrix_file);

/// Parses a manifest and binds it to an already loaded matrix.
///
/// Region/annotation rects may be given as "rect" (normalized) or "rect_px"
/// (pixels of the image's frame), the latter being converted on ingestion.
IndexedCollection collection_from_manifest(std::string_view manifest_json,
                                           EmbeddingMatrix matrix);

std::vector<Annotation> read_annotations(const std::filesystem::path& path);
std::vector<Annotation> parse_annotations(std::string_view jsonl);
void write_annotations(const std::filesystem::path& path,
                       const std::vector<Annotation>& annotations);

}  // namespace subsearch
