#pragma once

#include <array>
#include <cmath>

#include "realm/dream/pipeline.hpp"
#include "realm/error.hpp"
#include "realm/image.hpp"

namespace realm::dream {

/// Diverging palette over [0,1]: warm, salient reds at low realness, pale
/// yellow at 0.5, cool blues at high realness. Piecewise-linear between
/// RdYlBu-style anchors.
inline std::array<double, 3> realness_color(double v) {
  static constexpr double anchors[][4] = {
      {0.00, 0.647, 0.000, 0.149},
      {0.25, 0.957, 0.427, 0.263},
      {0.50, 1.000, 1.000, 0.750},
      {0.75, 0.455, 0.678, 0.820},
      {1.00, 0.192, 0.212, 0.584},
  };
  v = std::clamp(v, 0.0, 1.0);
  for (int i = 0; i < 4; ++i) {
    if (v <= anchors[i + 1][0]) {
      double t = (v - anchors[i][0]) / (anchors[i + 1][0] - anchors[i][0]);
      return {anchors[i][1] + t * (anchors[i + 1][1] - anchors[i][1]),
              anchors[i][2] + t * (anchors[i + 1][2] - anchors[i][2]),
              anchors[i][3] + t * (anchors[i + 1][3] - anchors[i][3])};
    }
  }
  return {anchors[4][1], anchors[4][2], anchors[4][3]};
}

struct HeatmapOptions {
  /// Weight of the underlying image in the output; 0 renders the pure
  /// color-mapped grid.
  double image_blend = 0.0;
};

/// Renders the final realness grid as an 8-bit color overlay on the image.
inline ImageU8 render_heatmap(const RealnessMap& map, const ImageF& image,
                              const HeatmapOptions& options = {}) {
  if (map.final_grid.height() != image.height() || map.final_grid.width() != image.width())
    throw InvalidInputError("render_heatmap: grid and image dimensions differ");
  if (options.image_blend < 0.0 || options.image_blend > 1.0)
    throw InvalidInputError("render_heatmap: image_blend outside [0, 1]");

  ImageU8 out(image.height(), image.width(), 3);
  const double blend = options.image_blend;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      auto rgb = realness_color(map.final_grid.at(y, x));
      double lum = image.luminance(y, x);
      for (int c = 0; c < 3; ++c)
        out.at(y, x, c) = to_byte((1.0 - blend) * rgb[c] + blend * lum);
    }
  }
  return out;
}

}  // namespace realm::dream
