#pragma once

#include <algorithm>
#include <cstdint>

namespace realm {

/// Axis-aligned rectangle in pixel coordinates, half-open: covers
/// x in [x0, x0+width), y in [y0, y0+height).
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;

  int x1() const { return x0 + width; }
  int y1() const { return y0 + height; }
  std::int64_t area() const { return std::int64_t(width) * height; }
  bool empty() const { return width <= 0 || height <= 0; }

  bool contains(int x, int y) const {
    return x >= x0 && x < x1() && y >= y0 && y < y1();
  }

  Rect intersect(const Rect& o) const {
    int ix0 = std::max(x0, o.x0);
    int iy0 = std::max(y0, o.y0);
    int ix1 = std::min(x1(), o.x1());
    int iy1 = std::min(y1(), o.y1());
    if (ix1 <= ix0 || iy1 <= iy0) return Rect{0, 0, 0, 0};
    return Rect{ix0, iy0, ix1 - ix0, iy1 - iy0};
  }

  bool operator==(const Rect& o) const = default;
};

}  // namespace realm
