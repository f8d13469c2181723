#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "realm/error.hpp"

namespace realm {

/// Fixed-length joint-space vector for a patch or a text description.
/// All entries finite, norm strictly positive.
class EmbeddingVector {
public:
  EmbeddingVector() = default;

  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidInputError("embedding must not be empty");
    double sq = 0.0;
    for (double v : values_) {
      if (!std::isfinite(v)) throw InvalidInputError("embedding entries must be finite");
      sq += v * v;
    }
    if (sq <= 0.0) throw InvalidInputError("zero embedding rejected");
    norm_ = std::sqrt(sq);
  }

  int dim() const { return static_cast<int>(values_.size()); }
  double norm() const { return norm_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  EmbeddingVector negated() const {
    std::vector<double> v(values_);
    for (double& x : v) x = -x;
    return EmbeddingVector(std::move(v));
  }

  bool operator==(const EmbeddingVector& o) const { return values_ == o.values_; }

  /// Unit basis vector e_axis — handy for constructing mock fields.
  static EmbeddingVector basis(int dim, int axis) {
    if (dim <= 0 || axis < 0 || axis >= dim) throw InvalidInputError("bad basis spec");
    std::vector<double> v(dim, 0.0);
    v[axis] = 1.0;
    return EmbeddingVector(std::move(v));
  }

private:
  std::vector<double> values_;
  double norm_ = 0.0;
};

struct BackendDescriptor {
  std::string name;
  int embedding_dim = 0;
  int max_batch = 0;
};

/// Cosine similarity, clamped to [-1, 1] so rounding drift can never push a
/// downstream realness score outside [0, 2].
inline double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim())
    throw InvalidInputError("cosine_similarity: dim mismatch (" + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()) + ")");
  double dot = 0.0;
  for (int i = 0; i < a.dim(); ++i) dot += a[i] * b[i];
  return std::clamp(dot / (a.norm() * b.norm()), -1.0, 1.0);
}

}  // namespace realm
