#pragma once

#include <cstddef>
#include <vector>

#include "realm/error.hpp"

namespace realm {

/// Dense row-major 2D grid.
template <typename T>
class Grid {
public:
  Grid() = default;
  Grid(int height, int width, T fill = T{})
      : height_(height), width_(width),
        data_(static_cast<std::size_t>(height) * width, fill) {
    if (height < 0 || width < 0) throw InvalidInputError("grid dims must be non-negative");
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool same_shape(const Grid& o) const { return height_ == o.height_ && width_ == o.width_; }

  bool operator==(const Grid& o) const = default;

private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

using GridD = Grid<double>;
using GridI = Grid<int>;

}  // namespace realm
