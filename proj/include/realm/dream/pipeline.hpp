#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "realm/backends/backend.hpp"
#include "realm/dream/patch_grid.hpp"
#include "realm/dream/scale_map.hpp"
#include "realm/error.hpp"
#include "realm/grid.hpp"
#include "realm/parallel.hpp"

namespace realm::dream {

enum class Fusion { kMax, kMin };

struct DreamConfig {
  std::vector<int> windows = {128, 64, 32};
  int stride = 4;
  Fusion fusion = Fusion::kMax;
  int threads = 1;

  void validate() const {
    if (windows.empty()) throw InvalidInputError("dream config: no windows");
    for (int w : windows)
      if (w <= 0) throw InvalidInputError("dream config: windows must be positive");
    if (stride < 1) throw InvalidInputError("dream config: stride must be >= 1");
    if (threads < 1) throw InvalidInputError("dream config: threads must be >= 1");
  }
};

inline const char* fusion_name(Fusion f) { return f == Fusion::kMax ? "max" : "min"; }

inline Fusion fusion_from_name(const std::string& name) {
  if (name == "max") return Fusion::kMax;
  if (name == "min") return Fusion::kMin;
  throw ConfigError("unknown fusion mode: " + name);
}

/// Dense realness output: the cross-scale fused grid, its [0,1]
/// normalization, and the per-scale intermediates that produced it.
struct RealnessMap {
  GridD fused_grid;
  GridD final_grid;
  std::vector<int> scales_used;
  std::string description;
  std::vector<ScaleMap> scale_maps;
  bool whole_image_fallback = false;

  int height() const { return final_grid.height(); }
  int width() const { return final_grid.width(); }
};

/// Elementwise max (default) or min across per-scale mean grids.
inline GridD fuse_scales(const std::vector<ScaleMap>& maps, Fusion fusion = Fusion::kMax) {
  if (maps.empty()) throw InvalidInputError("fuse_scales: no scale maps");
  const GridD& first = maps.front().mean_grid;
  GridD fused = first;
  for (std::size_t i = 1; i < maps.size(); ++i) {
    const GridD& m = maps[i].mean_grid;
    if (!m.same_shape(first)) throw InvalidInputError("fuse_scales: scale map shape mismatch");
    for (std::size_t j = 0; j < fused.size(); ++j) {
      double v = m.values()[j];
      double& f = fused.values()[j];
      f = fusion == Fusion::kMax ? std::max(f, v) : std::min(f, v);
    }
  }
  return fused;
}

/// Global min-max normalization to [0, 1]. A constant grid has no spatial
/// contrast evidence and maps to all 0.5.
inline GridD normalize_map(const GridD& fused) {
  if (fused.empty()) throw InvalidInputError("normalize_map: empty grid");
  double lo = fused.values()[0];
  double hi = lo;
  for (double v : fused.values()) {
    if (!std::isfinite(v)) throw InvalidInputError("normalize_map: non-finite value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  GridD out(fused.height(), fused.width(), 0.5);
  if (hi == lo) return out;
  double inv = 1.0 / (hi - lo);
  for (std::size_t i = 0; i < fused.size(); ++i)
    out.values()[i] = (fused.values()[i] - lo) * inv;
  return out;
}

namespace detail {

/// Scores every patch of one grid against the text embedding. Encoding runs
/// in index-aligned chunks (parallelizable), scores land positionally, so the
/// result does not depend on evaluation order.
inline std::vector<double> score_patches(const ImageF& image, const PatchGrid& grid,
                                         const EmbeddingVector& text,
                                         const EmbeddingBackend& backend, int threads) {
  const std::size_t n = grid.positions.size();
  std::vector<double> scores(n, 0.0);
  const int max_batch = std::max(1, backend.descriptor().max_batch);
  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    std::size_t i = begin;
    while (i < end) {
      std::size_t batch_end = std::min(end, i + static_cast<std::size_t>(max_batch));
      std::vector<PatchInput> batch;
      batch.reserve(batch_end - i);
      for (std::size_t k = i; k < batch_end; ++k)
        batch.push_back(PatchInput{&image, grid.patch_rect(k)});
      auto embeddings = backend.encode_patches(batch);
      if (embeddings.size() != batch.size())
        throw BackendError("backend returned wrong embedding count");
      for (std::size_t k = i; k < batch_end; ++k)
        scores[k] = patch_realness(embeddings[k - i], text);
      i = batch_end;
    }
  });
  return scores;
}

}  // namespace detail

/// Full DREAM pass: sliding-window extraction per scale, patch scoring
/// against the description, per-pixel averaging, cross-scale fusion and
/// [0,1] normalization. Windows larger than the image are skipped; when
/// none fit, the whole image is scored as a single patch.
inline RealnessMap compute_realness_map(const ImageF& image, const std::string& description,
                                        const EmbeddingBackend& backend,
                                        const DreamConfig& config = DreamConfig{}) {
  config.validate();
  if (image.empty()) throw InvalidInputError("compute_realness_map: empty image");

  RealnessMap result;
  result.description = description;
  const EmbeddingVector text = backend.encode_text(description);

  for (int window : config.windows) {
    auto grid = extract_positions(image.height(), image.width(), window, config.stride);
    if (!grid) continue;  // scale does not fit this image
    auto scores = detail::score_patches(image, *grid, text, backend, config.threads);
    result.scale_maps.push_back(accumulate_scale(*grid, scores));
    result.scales_used.push_back(window);
  }

  if (result.scale_maps.empty()) {
    // No configured scale fits: score the whole frame once. The map is
    // constant by construction and normalizes to all 0.5.
    auto embeddings = backend.encode_patches({PatchInput{&image, image.bounds()}});
    double r = patch_realness(embeddings.front(), text);
    result.whole_image_fallback = true;
    result.fused_grid = GridD(image.height(), image.width(), r);
  } else {
    result.fused_grid = fuse_scales(result.scale_maps, config.fusion);
  }
  result.final_grid = normalize_map(result.fused_grid);
  return result;
}

}  // namespace realm::dream
