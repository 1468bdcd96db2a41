#pragma once

#include <cstdint>
#include <span>

#include "wordfence/error.hpp"
#include "wordfence/grid.hpp"
#include "wordfence/io.hpp"
#include "wordfence/labelgen.hpp"

// Debug rendering: grayscale scene -> RGB with label classes tinted and
// detection boxes traced as one-pixel green perimeters.

namespace wf {

namespace detail {

inline void blend(RgbImage& img, int y, int x, int r, int g, int b, double alpha) {
  for (int c = 0; c < 3; ++c) {
    const int tint = c == 0 ? r : (c == 1 ? g : b);
    const double mixed = (1.0 - alpha) * img.at(y, x, c) + alpha * tint;
    img.at(y, x, c) = static_cast<std::uint8_t>(std::lround(std::clamp(mixed, 0.0, 255.0)));
  }
}

}  // namespace detail

// `labels` may be null; boxes outside the image are clipped away.
inline RgbImage render_overlay(const GridF& image, const GridU8* labels,
                               std::span<const BoxI> boxes) {
  if (image.channels() != 1) throw InvalidInput("render_overlay: image must be single-channel");
  const int h = image.height(), w = image.width();
  if (labels != nullptr && (labels->height() != h || labels->width() != w))
    throw InvalidInput("render_overlay: label dims do not match image");

  RgbImage out(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::uint8_t g = gray_byte(image.at(y, x, 0));
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = g;
    }

  if (labels != nullptr) {
    constexpr double kAlpha = 0.4;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::uint8_t cls = labels->at(y, x);
        if (cls == kText)
          detail::blend(out, y, x, 255, 0, 0, kAlpha);
        else if (cls == kBorder)
          detail::blend(out, y, x, 0, 0, 255, kAlpha);
      }
  }

  for (const BoxI& raw : boxes) {
    const BoxI b = raw.clipped(h, w);
    if (!b.valid()) continue;
    for (int x = b.x0; x < b.x1; ++x) {
      out.at(b.y0, x, 0) = 0, out.at(b.y0, x, 1) = 255, out.at(b.y0, x, 2) = 0;
      out.at(b.y1 - 1, x, 0) = 0, out.at(b.y1 - 1, x, 1) = 255, out.at(b.y1 - 1, x, 2) = 0;
    }
    for (int y = b.y0; y < b.y1; ++y) {
      out.at(y, b.x0, 0) = 0, out.at(y, b.x0, 1) = 255, out.at(y, b.x0, 2) = 0;
      out.at(y, b.x1 - 1, 0) = 0, out.at(y, b.x1 - 1, 1) = 255, out.at(y, b.x1 - 1, 2) = 0;
    }
  }
  return out;
}

}  // namespace wf
