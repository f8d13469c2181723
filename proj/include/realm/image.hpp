#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "realm/error.hpp"
#include "realm/geometry.hpp"

namespace realm {

/// Interleaved floating-point image, values in [0, 1], 1 or 3 channels.
class ImageF {
public:
  ImageF() = default;
  ImageF(int height, int width, int channels, double fill = 0.0)
      : height_(height), width_(width), channels_(channels),
        data_(static_cast<std::size_t>(height) * width * channels, fill) {
    if (height < 0 || width < 0) throw InvalidInputError("image dims must be non-negative");
    if (channels != 1 && channels != 3) throw InvalidInputError("image must have 1 or 3 channels");
  }

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  bool empty() const { return height_ == 0 || width_ == 0; }
  Rect bounds() const { return Rect{0, 0, width_, height_}; }

  double& at(int y, int x, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double at(int y, int x, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  double luminance(int y, int x) const {
    if (channels_ == 1) return at(y, x, 0);
    return 0.2126 * at(y, x, 0) + 0.7152 * at(y, x, 1) + 0.0722 * at(y, x, 2);
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  ImageF crop(const Rect& r) const {
    if (r.empty() || r.x0 < 0 || r.y0 < 0 || r.x1() > width_ || r.y1() > height_)
      throw InvalidInputError("crop rect outside image");
    ImageF out(r.height, r.width, channels_);
    for (int y = 0; y < r.height; ++y)
      for (int x = 0; x < r.width; ++x)
        for (int c = 0; c < channels_; ++c)
          out.at(y, x, c) = at(r.y0 + y, r.x0 + x, c);
    return out;
  }

  /// Bilinear resize. Degenerate 1-pixel sources replicate.
  ImageF resize(int new_height, int new_width) const {
    if (new_height <= 0 || new_width <= 0) throw InvalidInputError("resize dims must be positive");
    if (empty()) throw InvalidInputError("cannot resize empty image");
    ImageF out(new_height, new_width, channels_);
    const double sy = new_height > 1 ? double(height_ - 1) / (new_height - 1) : 0.0;
    const double sx = new_width > 1 ? double(width_ - 1) / (new_width - 1) : 0.0;
    for (int y = 0; y < new_height; ++y) {
      double fy = y * sy;
      int y0 = std::min(int(fy), height_ - 1);
      int y1 = std::min(y0 + 1, height_ - 1);
      double wy = fy - y0;
      for (int x = 0; x < new_width; ++x) {
        double fx = x * sx;
        int x0 = std::min(int(fx), width_ - 1);
        int x1 = std::min(x0 + 1, width_ - 1);
        double wx = fx - x0;
        for (int c = 0; c < channels_; ++c) {
          double top = at(y0, x0, c) * (1 - wx) + at(y0, x1, c) * wx;
          double bot = at(y1, x0, c) * (1 - wx) + at(y1, x1, c) * wx;
          out.at(y, x, c) = top * (1 - wy) + bot * wy;
        }
      }
    }
    return out;
  }

  ImageF flipped_horizontal() const {
    ImageF out(height_, width_, channels_);
    for (int y = 0; y < height_; ++y)
      for (int x = 0; x < width_; ++x)
        for (int c = 0; c < channels_; ++c)
          out.at(y, x, c) = at(y, width_ - 1 - x, c);
    return out;
  }

  bool operator==(const ImageF& o) const = default;

private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 1;
  std::vector<double> data_;
};

/// Interleaved 8-bit image for rendered outputs (heatmaps, plots).
class ImageU8 {
public:
  ImageU8() = default;
  ImageU8(int height, int width, int channels, std::uint8_t fill = 0)
      : height_(height), width_(width), channels_(channels),
        data_(static_cast<std::size_t>(height) * width * channels, fill) {
    if (channels != 1 && channels != 3) throw InvalidInputError("image must have 1 or 3 channels");
  }

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }

  std::uint8_t& at(int y, int x, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t at(int y, int x, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  const std::vector<std::uint8_t>& data() const { return data_; }
  std::vector<std::uint8_t>& data() { return data_; }

  bool operator==(const ImageU8& o) const = default;

private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 1;
  std::vector<std::uint8_t> data_;
};

inline std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

inline ImageU8 to_u8(const ImageF& img) {
  ImageU8 out(img.height(), img.width(), img.channels());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < img.channels(); ++c)
        out.at(y, x, c) = to_byte(img.at(y, x, c));
  return out;
}

inline ImageF to_f(const ImageU8& img) {
  ImageF out(img.height(), img.width(), img.channels());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < img.channels(); ++c)
        out.at(y, x, c) = img.at(y, x, c) / 255.0;
  return out;
}

}  // namespace realm
