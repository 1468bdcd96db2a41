#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "wordfence/error.hpp"

namespace wf {

// Axis-aligned pixel rectangle, half-open: [x0, x1) x [y0, y1).
struct BoxI {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  long long area() const { return static_cast<long long>(width()) * height(); }
  bool valid() const { return x0 < x1 && y0 < y1; }
  bool contains(int y, int x) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }

  BoxI dilated(int r) const { return {x0 - r, y0 - r, x1 + r, y1 + r}; }
  BoxI clipped(int img_h, int img_w) const {
    return {std::max(x0, 0), std::max(y0, 0), std::min(x1, img_w), std::min(y1, img_h)};
  }

  bool operator==(const BoxI&) const = default;
};

// Single-channel 2-D grid, row-major.
template <typename T>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int height, int width, T fill = T{}) : h_(height), w_(width) {
    if (height <= 0 || width <= 0) throw InvalidInput("Grid2: dimensions must be positive");
    v_.assign(static_cast<std::size_t>(height) * width, fill);
  }

  int height() const { return h_; }
  int width() const { return w_; }
  bool empty() const { return v_.empty(); }
  std::size_t size() const { return v_.size(); }

  T& at(int y, int x) {
    assert(y >= 0 && y < h_ && x >= 0 && x < w_);
    return v_[static_cast<std::size_t>(y) * w_ + x];
  }
  const T& at(int y, int x) const {
    assert(y >= 0 && y < h_ && x >= 0 && x < w_);
    return v_[static_cast<std::size_t>(y) * w_ + x];
  }

  std::vector<T>& data() { return v_; }
  const std::vector<T>& data() const { return v_; }

  bool same_dims(const Grid2& o) const { return h_ == o.h_ && w_ == o.w_; }
  bool operator==(const Grid2&) const = default;

 private:
  int h_ = 0;
  int w_ = 0;
  std::vector<T> v_;
};

// Multi-channel 2-D grid, row-major then channel: value (y, x, c) lives at
// (y * width + x) * channels + c, so the channels of one pixel are contiguous.
template <typename T>
class Grid3 {
 public:
  Grid3() = default;
  Grid3(int height, int width, int channels, T fill = T{})
      : h_(height), w_(width), c_(channels) {
    if (height <= 0 || width <= 0 || channels <= 0)
      throw InvalidInput("Grid3: dimensions must be positive");
    v_.assign(static_cast<std::size_t>(height) * width * channels, fill);
  }

  int height() const { return h_; }
  int width() const { return w_; }
  int channels() const { return c_; }
  bool empty() const { return v_.empty(); }
  std::size_t size() const { return v_.size(); }

  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * w_ + x) * c_ + c;
  }

  T& at(int y, int x, int c) {
    assert(y >= 0 && y < h_ && x >= 0 && x < w_ && c >= 0 && c < c_);
    return v_[index(y, x, c)];
  }
  const T& at(int y, int x, int c) const {
    assert(y >= 0 && y < h_ && x >= 0 && x < w_ && c >= 0 && c < c_);
    return v_[index(y, x, c)];
  }

  std::vector<T>& data() { return v_; }
  const std::vector<T>& data() const { return v_; }

  bool same_dims(const Grid3& o) const { return h_ == o.h_ && w_ == o.w_ && c_ == o.c_; }
  bool operator==(const Grid3&) const = default;

 private:
  int h_ = 0;
  int w_ = 0;
  int c_ = 0;
  std::vector<T> v_;
};

using GridU8 = Grid2<std::uint8_t>;
using GridU32 = Grid2<std::uint32_t>;
using GridF = Grid3<double>;

// ---------------------------------------------------------------------------
// Channel-wise numeric primitives.
// ---------------------------------------------------------------------------

// Per-pixel softmax over channels, stabilized by max subtraction.
inline GridF softmax_channels(const GridF& logits) {
  if (logits.empty()) throw InvalidInput("softmax_channels: empty grid");
  GridF out(logits.height(), logits.width(), logits.channels());
  const int c = logits.channels();
  const double* in = logits.data().data();
  double* ov = out.data().data();
  const std::size_t pixels = logits.size() / c;
  for (std::size_t p = 0; p < pixels; ++p) {
    const double* px = in + p * c;
    double m = px[0];
    for (int i = 0; i < c; ++i) {
      if (!std::isfinite(px[i])) throw InvalidInput("softmax_channels: non-finite logit");
      m = std::max(m, px[i]);
    }
    double denom = 0.0;
    double* opx = ov + p * c;
    for (int i = 0; i < c; ++i) {
      opx[i] = std::exp(px[i] - m);
      denom += opx[i];
    }
    for (int i = 0; i < c; ++i) opx[i] /= denom;
  }
  return out;
}

// Per-pixel channel argmax; ties go to the lowest channel index.
inline GridU8 argmax_channels(const GridF& probs) {
  if (probs.empty()) throw InvalidInput("argmax_channels: empty grid");
  GridU8 out(probs.height(), probs.width());
  const int c = probs.channels();
  const double* in = probs.data().data();
  const std::size_t pixels = probs.size() / c;
  for (std::size_t p = 0; p < pixels; ++p) {
    const double* px = in + p * c;
    int best = 0;
    for (int i = 1; i < c; ++i)
      if (px[i] > px[best]) best = i;
    out.data()[p] = static_cast<std::uint8_t>(best);
  }
  return out;
}

// Bilinear resize under the align-corners convention: output corner samples
// coincide exactly with input corner samples, and a single input row/column
// extends as a constant. Channels are interpolated independently. Resizing
// to the input dimensions returns the input bit-identically.
inline GridF bilinear_resize(const GridF& map, int out_h, int out_w) {
  if (map.empty()) throw InvalidInput("bilinear_resize: empty grid");
  if (out_h <= 0 || out_w <= 0)
    throw InvalidInput("bilinear_resize: output dimensions must be positive");
  if (out_h == map.height() && out_w == map.width()) return map;

  const int ih = map.height(), iw = map.width(), c = map.channels();
  GridF out(out_h, out_w, c);
  const double sy = (out_h > 1 && ih > 1) ? static_cast<double>(ih - 1) / (out_h - 1) : 0.0;
  const double sx = (out_w > 1 && iw > 1) ? static_cast<double>(iw - 1) / (out_w - 1) : 0.0;

  for (int y = 0; y < out_h; ++y) {
    const double src_y = y * sy;
    int y0 = static_cast<int>(src_y);
    if (y0 > ih - 1) y0 = ih - 1;
    const int y1 = std::min(y0 + 1, ih - 1);
    const double fy = src_y - y0;
    for (int x = 0; x < out_w; ++x) {
      const double src_x = x * sx;
      int x0 = static_cast<int>(src_x);
      if (x0 > iw - 1) x0 = iw - 1;
      const int x1 = std::min(x0 + 1, iw - 1);
      const double fx = src_x - x0;
      for (int ch = 0; ch < c; ++ch) {
        const double a = map.at(y0, x0, ch);
        const double b = map.at(y0, x1, ch);
        const double d = map.at(y1, x0, ch);
        const double e = map.at(y1, x1, ch);
        // Lerp form keeps integral sample positions exact.
        const double top = a + fx * (b - a);
        const double bot = d + fx * (e - d);
        out.at(y, x, ch) = top + fy * (bot - top);
      }
    }
  }
  return out;
}

}  // namespace wf
