#pragma once

#include <string>
#include <vector>

#include "realm/dream/patch_grid.hpp"
#include "realm/embedding.hpp"
#include "realm/error.hpp"
#include "realm/grid.hpp"

namespace realm::dream {

/// Per-pixel realness at one window size: running sum and covering-patch
/// count per pixel, and their ratio (the per-scale mean in [0, 2]).
struct ScaleMap {
  int window = 0;
  GridD sum_grid;
  GridI count_grid;
  GridD mean_grid;
};

/// Patch realness from a patch embedding and the text embedding:
/// one minus their cosine similarity, in [0, 2]. Strong text match means
/// a well-described inconsistency, hence low realness.
inline double patch_realness(const EmbeddingVector& patch_embedding,
                             const EmbeddingVector& text_embedding) {
  return 1.0 - cosine_similarity(patch_embedding, text_embedding);
}

/// Averages per-patch scores into a per-pixel map. Uses 2D difference grids
/// so cost is O(#patches + #pixels) instead of O(#patches * W^2), and the
/// accumulation order is fixed by grid position, never by evaluation order.
inline ScaleMap accumulate_scale(const PatchGrid& grid, const std::vector<double>& scores) {
  if (scores.size() != grid.positions.size())
    throw InvalidInputError("accumulate_scale: " + std::to_string(scores.size()) +
                            " scores for " + std::to_string(grid.positions.size()) +
                            " positions");
  const int h = grid.image_height;
  const int w = grid.image_width;

  // Difference grids carry one extra row/column for the closing corners.
  Grid<double> sum_diff(h + 1, w + 1, 0.0);
  Grid<int> count_diff(h + 1, w + 1, 0);
  for (std::size_t k = 0; k < grid.positions.size(); ++k) {
    double r = scores[k];
    if (!(r >= 0.0 && r <= 2.0))
      throw InvalidInputError("accumulate_scale: score " + std::to_string(k) +
                              " outside [0, 2]");
    const auto& p = grid.positions[k];
    int y1 = p.y + grid.window;
    int x1 = p.x + grid.window;
    sum_diff.at(p.y, p.x) += r;
    sum_diff.at(p.y, x1) -= r;
    sum_diff.at(y1, p.x) -= r;
    sum_diff.at(y1, x1) += r;
    count_diff.at(p.y, p.x) += 1;
    count_diff.at(p.y, x1) -= 1;
    count_diff.at(y1, p.x) -= 1;
    count_diff.at(y1, x1) += 1;
  }

  ScaleMap out;
  out.window = grid.window;
  out.sum_grid = GridD(h, w, 0.0);
  out.count_grid = GridI(h, w, 0);
  out.mean_grid = GridD(h, w, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = sum_diff.at(y, x);
      int c = count_diff.at(y, x);
      if (x > 0) { s += sum_diff.at(y, x - 1); c += count_diff.at(y, x - 1); }
      if (y > 0) { s += sum_diff.at(y - 1, x); c += count_diff.at(y - 1, x); }
      if (x > 0 && y > 0) { s -= sum_diff.at(y - 1, x - 1); c -= count_diff.at(y - 1, x - 1); }
      sum_diff.at(y, x) = s;
      count_diff.at(y, x) = c;
      if (c < 1) throw ComputeError("accumulate_scale: uncovered pixel, coverage invariant broken");
      out.sum_grid.at(y, x) = s;
      out.count_grid.at(y, x) = c;
      out.mean_grid.at(y, x) = s / c;
    }
  }
  return out;
}

}  // namespace realm::dream
