#pragma once

#include <cstdint>
#include <vector>

#include "wordfence/error.hpp"
#include "wordfence/grid.hpp"
#include "wordfence/labelgen.hpp"

// Connected-component analysis on one class of a label map, and conversion
// of components into word bounding boxes.

namespace wf {

struct ComponentStats {
  std::size_t pixels = 0;
  BoxI bounds;  // tight half-open bounding box
};

struct ComponentMap {
  GridU32 ids;  // 0 = not the target class; component ids dense in 1..count
  std::uint32_t count = 0;
  std::vector<ComponentStats> stats;  // stats[i] describes id i+1
};

// Components are discovered in raster-scan order, so ids are deterministic.
// Two pixels share an id iff they are connected through target-class pixels
// under the requested connectivity (4 or 8).
inline ComponentMap connected_components(const GridU8& labels, std::uint8_t target_class = kText,
                                         int connectivity = 4) {
  if (labels.empty()) throw InvalidInput("connected_components: empty label grid");
  if (connectivity != 4 && connectivity != 8)
    throw InvalidInput("connected_components: connectivity must be 4 or 8");
  const int h = labels.height(), w = labels.width();
  ComponentMap cm;
  cm.ids = GridU32(h, w, 0);

  static constexpr int dy8[8] = {-1, 0, 0, 1, -1, -1, 1, 1};
  static constexpr int dx8[8] = {0, -1, 1, 0, -1, 1, -1, 1};
  const int neighbors = (connectivity == 4) ? 4 : 8;

  std::vector<std::pair<int, int>> stack;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      if (labels.at(sy, sx) != target_class || cm.ids.at(sy, sx) != 0) continue;
      const std::uint32_t id = ++cm.count;
      ComponentStats stats;
      stats.bounds = {sx, sy, sx + 1, sy + 1};
      stack.clear();
      stack.emplace_back(sy, sx);
      cm.ids.at(sy, sx) = id;
      while (!stack.empty()) {
        const auto [y, x] = stack.back();
        stack.pop_back();
        ++stats.pixels;
        stats.bounds.x0 = std::min(stats.bounds.x0, x);
        stats.bounds.y0 = std::min(stats.bounds.y0, y);
        stats.bounds.x1 = std::max(stats.bounds.x1, x + 1);
        stats.bounds.y1 = std::max(stats.bounds.y1, y + 1);
        for (int n = 0; n < neighbors; ++n) {
          const int ny = y + dy8[n], nx = x + dx8[n];
          if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
          if (labels.at(ny, nx) != target_class || cm.ids.at(ny, nx) != 0) continue;
          cm.ids.at(ny, nx) = id;
          stack.emplace_back(ny, nx);
        }
      }
      cm.stats.push_back(stats);
    }
  }
  return cm;
}

// Tight boxes for components with at least min_area pixels, optionally
// expanded by `expand` pixels on every side and clipped to the image.
// Output is sorted by (y0, x0).
inline std::vector<BoxI> components_to_boxes(const ComponentMap& components, int min_area = 6,
                                             int expand = 0) {
  if (components.ids.empty()) throw InvalidInput("components_to_boxes: empty component map");
  if (min_area < 0 || expand < 0)
    throw InvalidInput("components_to_boxes: min_area and expand must be >= 0");
  const int h = components.ids.height(), w = components.ids.width();
  std::vector<BoxI> boxes;
  for (const ComponentStats& s : components.stats) {
    if (s.pixels < static_cast<std::size_t>(min_area)) continue;
    const BoxI box = s.bounds.dilated(expand).clipped(h, w);
    if (box.valid()) boxes.push_back(box);
  }
  std::sort(boxes.begin(), boxes.end(), [](const BoxI& a, const BoxI& b) {
    if (a.y0 != b.y0) return a.y0 < b.y0;
    if (a.x0 != b.x0) return a.x0 < b.x0;
    if (a.y1 != b.y1) return a.y1 < b.y1;
    return a.x1 < b.x1;
  });
  return boxes;
}

}  // namespace wf
