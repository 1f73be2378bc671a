#include "subsearch/embedding.hpp"

#include <cmath>
#include <string>

#include "subsearch/error.hpp"

namespace subsearch {

namespace {

double dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

void require_finite(std::span<const float> v) {
  for (float x : v) {
    if (!std::isfinite(x)) throw InvalidArgument("non-finite embedding value");
  }
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<float> values)
    : values_(std::move(values)) {
  require_finite(values_);
}

double EmbeddingVector::norm() const { return l2_norm(values_); }

bool EmbeddingVector::is_normalized(double tolerance) const {
  return std::abs(norm() - 1.0) <= tolerance;
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::vector<float> data)
    : dim_(dim), data_(std::move(data)) {
  if (dim_ == 0) throw InvalidArgument("embedding dim must be positive");
  if (data_.size() % dim_ != 0) {
    throw InvalidArgument("matrix data is not a multiple of dim");
  }
}

std::size_t EmbeddingMatrix::append(std::span<const float> row) {
  if (dim_ == 0) dim_ = row.size();
  if (row.size() != dim_ || dim_ == 0) {
    throw InvalidArgument("row dim " + std::to_string(row.size()) +
                          " does not match matrix dim " +
                          std::to_string(dim_));
  }
  data_.insert(data_.end(), row.begin(), row.end());
  return rows() - 1;
}

double l2_norm(std::span<const float> v) { return std::sqrt(dot(v, v)); }

EmbeddingVector l2_normalize(std::span<const float> v) {
  const double n = l2_norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvalidArgument("degenerate embedding");
  }
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(v[i]) / n);
  }
  return EmbeddingVector(std::move(out));
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("embedding dim mismatch: " +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  return dot(a, b);
}

double semantic_distance(std::span<const float> a, std::span<const float> b) {
  return 1.0 - cosine_similarity(a, b);
}

std::vector<double> score_rows(const EmbeddingMatrix& m,
                               std::span<const float> query) {
  if (query.size() != m.dim()) {
    throw InvalidArgument("embedding dim mismatch: " +
                          std::to_string(query.size()) + " vs " +
                          std::to_string(m.dim()));
  }
  std::vector<double> scores(m.rows());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = dot(m.row(i), query);
  }
  return scores;
}

}  // namespace subsearch
