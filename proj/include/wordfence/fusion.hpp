#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "wordfence/error.hpp"
#include "wordfence/grid.hpp"
#include "wordfence/toynet.hpp"

// Multi-scale inference and voting fusion. The image is rescaled to each
// requested factor, run through the network, and softmaxed; per-scale
// probability maps keep their native sizes. Fusion upscales every map to
// the target size and lets each scale cast one soft vote per pixel: only
// the channel holding that scale's per-pixel maximum receives its
// probability value, the rest receive zero. The fused label is the argmax
// of the summed votes, ties to the lowest channel index. Upscaled
// probabilities are deliberately not renormalized; votes read single
// channels so the simplex defect of bilinear resampling is irrelevant.

namespace wf {

struct ScaleSet {
  std::vector<double> scales{0.5, 1.0, 2.0};

  void validate() const {
    if (scales.empty()) throw InvalidInput("ScaleSet: at least one scale required");
    for (double s : scales)
      if (!(s > 0.0)) throw InvalidInput("ScaleSet: scales must be positive");
  }
};

inline std::vector<GridF> infer_multiscale(const NetworkParams& params, const GridF& image,
                                           const ScaleSet& scaleset) {
  if (image.empty() || image.channels() != 1)
    throw InvalidInput("infer_multiscale: expected a single-channel image");
  if (scaleset.scales.empty()) throw InvalidInput("infer_multiscale: empty scale set");
  std::vector<GridF> maps;
  maps.reserve(scaleset.scales.size());
  for (double s : scaleset.scales) {
    if (!(s > 0.0)) throw InvalidInput("infer_multiscale: scales must be positive");
    const int sh = static_cast<int>(std::llround(s * image.height()));
    const int sw = static_cast<int>(std::llround(s * image.width()));
    if (sh < 1 || sw < 1) throw InvalidInput("infer_multiscale: scale produces an empty map");
    const GridF scaled = bilinear_resize(image, sh, sw);
    maps.push_back(softmax_channels(forward(params, scaled)));
  }
  return maps;
}

// Summed maximum probabilities from all scales, at the target size.
inline GridF vote_accumulator(std::span<const GridF> maps, int target_h, int target_w) {
  if (maps.empty()) throw InvalidInput("vote_accumulator: no maps to fuse");
  if (target_h < 1 || target_w < 1)
    throw InvalidInput("vote_accumulator: target dimensions must be positive");
  const int c = maps.front().channels();
  for (const GridF& m : maps)
    if (m.empty() || m.channels() != c)
      throw InvalidInput("vote_accumulator: maps must share a channel count");
  GridF acc(target_h, target_w, c);
  for (const GridF& m : maps) {
    const GridF up = bilinear_resize(m, target_h, target_w);
    const double* uv = up.data().data();
    double* av = acc.data().data();
    const std::size_t pixels = up.size() / c;
    for (std::size_t p = 0; p < pixels; ++p) {
      const double* px = uv + p * c;
      int best = 0;
      for (int i = 1; i < c; ++i)
        if (px[i] > px[best]) best = i;
      av[p * c + best] += px[best];
    }
  }
  return acc;
}

inline GridU8 fuse_votes(std::span<const GridF> maps, int target_h, int target_w) {
  return argmax_channels(vote_accumulator(maps, target_h, target_w));
}

}  // namespace wf
