#pragma once

#include <optional>
#include <vector>

#include "realm/error.hpp"
#include "realm/geometry.hpp"

namespace realm::dream {

struct Position {
  int x = 0;
  int y = 0;
  bool operator==(const Position&) const = default;
};

/// Sliding-window layout for one scale: all WxW patch origins, row-major.
/// Regular stride grid plus an edge-aligned final row/column, so the union
/// of patches covers every pixel without padding.
struct PatchGrid {
  int window = 0;
  int stride = 0;
  int image_height = 0;
  int image_width = 0;
  std::vector<Position> positions;

  Rect patch_rect(std::size_t k) const {
    return Rect{positions[k].x, positions[k].y, window, window};
  }
};

/// Start offsets along one axis: multiples of `stride` in [0, dim-window],
/// plus dim-window itself when the last multiple stops short of the edge.
inline std::vector<int> axis_starts(int dim, int window, int stride) {
  std::vector<int> starts;
  int last = dim - window;
  for (int s = 0; s <= last; s += stride) starts.push_back(s);
  if (starts.back() != last) starts.push_back(last);
  return starts;
}

/// Builds the patch grid for one scale, or nullopt when the window does not
/// fit the image (scale-skip signal, not an error).
inline std::optional<PatchGrid> extract_positions(int image_height, int image_width,
                                                  int window, int stride) {
  if (window <= 0) throw InvalidInputError("window must be positive");
  if (stride < 1) throw InvalidInputError("stride must be >= 1");
  if (image_height <= 0 || image_width <= 0) throw InvalidInputError("empty image");
  if (window > image_height || window > image_width) return std::nullopt;

  PatchGrid grid;
  grid.window = window;
  grid.stride = stride;
  grid.image_height = image_height;
  grid.image_width = image_width;
  auto ys = axis_starts(image_height, window, stride);
  auto xs = axis_starts(image_width, window, stride);
  grid.positions.reserve(ys.size() * xs.size());
  for (int y : ys)
    for (int x : xs) grid.positions.push_back(Position{x, y});
  return grid;
}

}  // namespace realm::dream
