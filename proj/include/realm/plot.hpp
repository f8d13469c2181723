#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "realm/error.hpp"
#include "realm/image.hpp"
#include "realm/metrics.hpp"

namespace realm::plot {

using Color = std::array<std::uint8_t, 3>;

namespace detail {

/// 5x7 bitmap glyphs, one byte per row, low 5 bits used. Text is uppercased
/// before lookup; anything without a glyph renders as a hollow box.
inline const std::uint8_t* glyph(char c) {
  using G = std::uint8_t[7];
  static const G font[] = {
      /* 0 */ {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},
      /* 1 */ {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},
      /* 2 */ {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},
      /* 3 */ {0x0E, 0x11, 0x01, 0x06, 0x01, 0x11, 0x0E},
      /* 4 */ {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},
      /* 5 */ {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},
      /* 6 */ {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},
      /* 7 */ {0x1F, 0x01, 0x02, 0x04, 0x04, 0x04, 0x04},
      /* 8 */ {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},
      /* 9 */ {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},
      /* A */ {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11},
      /* B */ {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E},
      /* C */ {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E},
      /* D */ {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C},
      /* E */ {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F},
      /* F */ {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10},
      /* G */ {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F},
      /* H */ {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11},
      /* I */ {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E},
      /* J */ {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C},
      /* K */ {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11},
      /* L */ {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F},
      /* M */ {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11},
      /* N */ {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11},
      /* O */ {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E},
      /* P */ {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10},
      /* Q */ {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D},
      /* R */ {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11},
      /* S */ {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E},
      /* T */ {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04},
      /* U */ {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E},
      /* V */ {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04},
      /* W */ {0x11, 0x11, 0x11, 0x15, 0x15, 0x1B, 0x11},
      /* X */ {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11},
      /* Y */ {0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04},
      /* Z */ {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F},
      /* . */ {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C},
      /* - */ {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00},
      /* : */ {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00},
      /* _ */ {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F},
      /* / */ {0x01, 0x02, 0x02, 0x04, 0x08, 0x08, 0x10},
      /* + */ {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00},
      /* = */ {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00},
      /* sp */ {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},
      /* box */ {0x1F, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1F},
  };
  c = char(std::toupper(static_cast<unsigned char>(c)));
  if (c >= '0' && c <= '9') return font[c - '0'];
  if (c >= 'A' && c <= 'Z') return font[10 + (c - 'A')];
  switch (c) {
    case '.': return font[36];
    case '-': return font[37];
    case ':': return font[38];
    case '_': return font[39];
    case '/': return font[40];
    case '+': return font[41];
    case '=': return font[42];
    case ' ': return font[43];
    default: return font[44];
  }
}

inline void put_pixel(ImageU8& img, int x, int y, const Color& color) {
  if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
  for (int c = 0; c < 3; ++c) img.at(y, x, c) = color[c];
}

/// Top-left anchored 5x7 text; returns the x just past the last glyph.
inline int draw_text(ImageU8& img, int x, int y, const std::string& text,
                     const Color& color) {
  for (char ch : text) {
    const std::uint8_t* rows = glyph(ch);
    for (int r = 0; r < 7; ++r)
      for (int b = 0; b < 5; ++b)
        if (rows[r] & (1 << (4 - b))) put_pixel(img, x + b, y + r, color);
    x += 6;
  }
  return x;
}

inline int text_width(const std::string& text) { return int(text.size()) * 6; }

inline void draw_line(ImageU8& img, int x0, int y0, int x1, int y1, const Color& color) {
  int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    put_pixel(img, x0, y0, color);
    if (x0 == x1 && y0 == y1) break;
    int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

inline void draw_disc(ImageU8& img, int cx, int cy, int radius, const Color& color) {
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) put_pixel(img, cx + dx, cy + dy, color);
}

/// Evenly spaced round-number ticks covering [lo, hi] with roughly `want`
/// entries: step is the nearest 1/2/5 x 10^k to the raw spacing.
inline std::vector<double> nice_ticks(double lo, double hi, int want) {
  if (!(hi > lo) || want < 2) throw InvalidInputError("nice_ticks: bad range");
  double raw = (hi - lo) / double(want - 1);
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double frac = raw / mag;
  double step = frac < 1.5 ? 1.0 : frac < 3.0 ? 2.0 : frac < 7.0 ? 5.0 : 10.0;
  step *= mag;
  std::vector<double> ticks;
  double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + step * 1e-9; t += step)
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  return ticks;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace detail

/// One point cloud on the scatter: x is the subjective score axis, y the
/// model's prediction for the same sample.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ScatterOptions {
  int width = 640;
  int height = 640;
  bool identity_line = true;  // the y = x reference
  std::string title;
  std::string x_label = "MOS";
  std::string y_label = "PREDICTION";
};

inline Series series_from_report(const metrics::EvalReport& report) {
  Series s;
  s.label = report.split_name;
  for (const auto& sample : report.samples) {
    s.x.push_back(sample.mos);
    s.y.push_back(sample.prediction);
  }
  return s;
}

/// Predictions-versus-scores scatter with shared axes, round-number ticks,
/// an identity reference, and a legend entry per series. Both axes share one
/// range so the identity line means what it says.
inline ImageU8 render_scatter(const std::vector<Series>& series,
                              const ScatterOptions& options = {}) {
  if (series.empty()) throw InvalidInputError("render_scatter: no series");
  for (const auto& s : series) {
    if (s.x.empty()) throw InvalidInputError("render_scatter: empty series");
    if (s.x.size() != s.y.size())
      throw InvalidInputError("render_scatter: x/y length mismatch in '" + s.label + "'");
    for (double v : s.x)
      if (!std::isfinite(v)) throw InvalidInputError("render_scatter: non-finite x");
    for (double v : s.y)
      if (!std::isfinite(v)) throw InvalidInputError("render_scatter: non-finite y");
  }
  if (options.width < 160 || options.height < 160)
    throw InvalidInputError("render_scatter: canvas too small");

  static const Color kFrame{0, 0, 0};
  static const Color kGridline{225, 225, 225};
  static const Color kIdentity{150, 150, 150};
  static const Color kText{40, 40, 40};
  static const std::array<Color, 4> kPalette{
      Color{31, 119, 180}, Color{255, 127, 14}, Color{44, 160, 44}, Color{214, 39, 40}};

  ImageU8 img(options.height, options.width, 3);
  for (auto& b : img.data()) b = 255;  // white canvas

  // Common range for both axes, padded 5%.
  double lo = series[0].x[0], hi = lo;
  for (const auto& s : series) {
    for (double v : s.x) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (double v : s.y) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const int left = 56, right = options.width - 20;
  const int top = options.title.empty() ? 20 : 34;
  const int bottom = options.height - 44;
  auto to_px = [&](double v) {
    return left + int(std::lround((v - lo) / (hi - lo) * double(right - left)));
  };
  auto to_py = [&](double v) {
    return bottom - int(std::lround((v - lo) / (hi - lo) * double(bottom - top)));
  };

  // Gridlines + tick labels on both axes (shared ticks, shared range).
  auto ticks = detail::nice_ticks(lo, hi, 6);
  for (double t : ticks) {
    int px = to_px(t), py = to_py(t);
    detail::draw_line(img, px, top, px, bottom, kGridline);
    detail::draw_line(img, left, py, right, py, kGridline);
  }
  for (double t : ticks) {
    int px = to_px(t), py = to_py(t);
    detail::draw_line(img, px, bottom, px, bottom + 3, kFrame);
    detail::draw_line(img, left - 3, py, left, py, kFrame);
    std::string label = detail::tick_label(t);
    detail::draw_text(img, px - detail::text_width(label) / 2, bottom + 6, label, kText);
    detail::draw_text(img, left - 6 - detail::text_width(label), py - 3, label, kText);
  }

  if (options.identity_line)
    detail::draw_line(img, to_px(lo), to_py(lo), to_px(hi), to_py(hi), kIdentity);

  // Axis frame above gridlines, below data.
  detail::draw_line(img, left, top, left, bottom, kFrame);
  detail::draw_line(img, left, bottom, right, bottom, kFrame);
  detail::draw_line(img, right, top, right, bottom, kFrame);
  detail::draw_line(img, left, top, right, top, kFrame);

  for (std::size_t k = 0; k < series.size(); ++k) {
    const Color& color = kPalette[k % kPalette.size()];
    for (std::size_t i = 0; i < series[k].x.size(); ++i)
      detail::draw_disc(img, to_px(series[k].x[i]), to_py(series[k].y[i]), 2, color);
  }

  // Legend, top-left inside the frame; skipped for a single unlabeled series.
  bool want_legend = series.size() > 1 || !series[0].label.empty();
  if (want_legend) {
    int ly = top + 6;
    for (std::size_t k = 0; k < series.size(); ++k) {
      const Color& color = kPalette[k % kPalette.size()];
      detail::draw_disc(img, left + 12, ly + 3, 2, color);
      detail::draw_text(img, left + 20, ly, series[k].label, kText);
      ly += 11;
    }
  }

  if (!options.title.empty())
    detail::draw_text(img, (options.width - detail::text_width(options.title)) / 2, 10,
                      options.title, kText);
  detail::draw_text(img, (left + right - detail::text_width(options.x_label)) / 2,
                    options.height - 12, options.x_label, kText);
  detail::draw_text(img, 4, top - 12, options.y_label, kText);

  return img;
}

}  // namespace realm::plot
