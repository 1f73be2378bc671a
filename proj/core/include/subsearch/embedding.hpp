#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace subsearch {

/// Dense float32 embedding. Components are always finite.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<float> values);

  std::size_t dim() const { return values_.size(); }
  std::span<const float> values() const { return values_; }
  operator std::span<const float>() const { return values_; }

  double norm() const;
  bool is_normalized(double tolerance = 1e-5) const;

  friend bool operator==(const EmbeddingVector&,
                         const EmbeddingVector&) = default;

 private:
  std::vector<float> values_;
};

/// Row-major n x dim float32 matrix.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t dim, std::vector<float> data);

  std::size_t dim() const { return dim_; }
  std::size_t rows() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<const float> data() const { return data_; }

  /// Appends a row and returns its index.
  std::size_t append(std::span<const float> row);

  friend bool operator==(const EmbeddingMatrix&,
                         const EmbeddingMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

double l2_norm(std::span<const float> v);

/// Returns v / |v|. Throws InvalidArgument("degenerate embedding") for a zero
/// or non-finite vector.
EmbeddingVector l2_normalize(std::span<const float> v);

/// Dot product of two equal-length vectors, accumulated in double. Equals the
/// cosine similarity for normalized inputs. Throws on dim mismatch.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// 1 - cosine_similarity(a, b).
double semantic_distance(std::span<const float> a, std::span<const float> b);

/// s = M q^T: cosine similarity of every matrix row with `query`.
std::vector<double> score_rows(const EmbeddingMatrix& m,
                               std::span<const float> query);

}  // namespace subsearch
