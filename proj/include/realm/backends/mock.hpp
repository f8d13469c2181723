#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "realm/backends/backend.hpp"

namespace realm {

/// Deterministic embedding field for oracle tests: a base vector everywhere,
/// plus planted rectangular regions carrying their own vectors. A patch maps
/// to the normalized convex combination of base and region vectors, weighted
/// by the fraction of the patch covered by each region. The vector is a pure
/// function of patch geometry, so similarity gradients around a planted
/// region are smooth and predictable in closed form.
struct MockField {
  struct PlantedRegion {
    Rect rect;
    EmbeddingVector vector;
  };

  EmbeddingVector base_vector;
  EmbeddingVector text_vector;
  std::vector<PlantedRegion> regions;

  EmbeddingVector blend(const Rect& patch) const {
    std::vector<double> acc(base_vector.values());
    double region_total = 0.0;
    std::vector<double> weights(regions.size(), 0.0);
    for (std::size_t i = 0; i < regions.size(); ++i) {
      double frac = double(patch.intersect(regions[i].rect).area()) / double(patch.area());
      weights[i] = frac;
      region_total += frac;
    }
    // Overlapping regions cannot claim more than the whole patch.
    double scale = region_total > 1.0 ? 1.0 / region_total : 1.0;
    double base_w = 1.0 - std::min(region_total, 1.0);
    for (auto& v : acc) v *= base_w;
    for (std::size_t i = 0; i < regions.size(); ++i) {
      double w = weights[i] * scale;
      if (w == 0.0) continue;
      for (int d = 0; d < base_vector.dim(); ++d) acc[d] += w * regions[i].vector[d];
    }
    return EmbeddingVector(std::move(acc));
  }
};

/// Offline backend over a MockField. encode_text ignores the text content and
/// returns the field's fixed text vector (after the usual precondition check).
class MockBackend : public EmbeddingBackend {
public:
  explicit MockBackend(MockField field, int max_batch = 64)
      : field_(std::move(field)), max_batch_(max_batch) {
    if (max_batch_ <= 0) throw InvalidInputError("max_batch must be positive");
    for (const auto& r : field_.regions) {
      if (r.vector.dim() != field_.base_vector.dim())
        throw InvalidInputError("mock field vectors must share one dim");
      if (r.rect.empty()) throw InvalidInputError("planted region must have area");
    }
    if (field_.text_vector.dim() != field_.base_vector.dim())
      throw InvalidInputError("mock field vectors must share one dim");
  }

  BackendDescriptor descriptor() const override {
    return BackendDescriptor{"mock", field_.base_vector.dim(), max_batch_};
  }

  EmbeddingVector encode_text(const std::string& description) const override {
    check_text(description);
    return field_.text_vector;
  }

  std::vector<EmbeddingVector> encode_patches(
      const std::vector<PatchInput>& patches) const override {
    check_patches(patches);
    std::vector<EmbeddingVector> out;
    out.reserve(patches.size());
    for (const auto& p : patches) out.push_back(field_.blend(p.rect));
    return out;
  }

  const MockField& field() const { return field_; }

private:
  MockField field_;
  int max_batch_;
};

}  // namespace realm
