#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wordfence/error.hpp"
#include "wordfence/grid.hpp"

// Ground-truth generation. Words are axis-aligned boxes; each word is
// surrounded by an artificial border ring so that adjacent words stay
// separable in the segmentation output. Geometry rules:
//
//   text   = union of word-box interiors
//   border = union of (box dilated by border_width, minus the box itself),
//            Chebyshev (square) dilation, clipped to the image
//   precedence: border > text > background. A pixel inside one word's box
//   and inside another word's ring is border; the fence wins.
//
// Words flagged `ignore` paint their dilated region into the ignore mask
// instead of the class grid; ignored pixels are excluded from loss and
// from evaluation counts. border_width 0 disables the ring entirely and
// yields plain two-class text/background maps.

namespace wf {

inline constexpr std::uint8_t kBackground = 0;
inline constexpr std::uint8_t kText = 1;
inline constexpr std::uint8_t kBorder = 2;
inline constexpr int kNumClasses = 3;

struct WordAnnotation {
  BoxI box;
  std::string text;       // may be empty only for ignore regions
  bool ignore = false;

  bool operator==(const WordAnnotation&) const = default;
};

struct LabelMap {
  GridU8 classes;               // values in {kBackground, kText, kBorder}
  Grid2<std::uint8_t> ignore_mask;  // 1 = excluded from loss and evaluation

  int height() const { return classes.height(); }
  int width() const { return classes.width(); }
};

namespace detail {

inline void paint_rect(Grid2<std::uint8_t>& mask, const BoxI& box) {
  for (int y = box.y0; y < box.y1; ++y)
    for (int x = box.x0; x < box.x1; ++x) mask.at(y, x) = 1;
}

}  // namespace detail

inline LabelMap rasterize_labels(std::span<const WordAnnotation> annotations, int h, int w,
                                 int border_width = 8) {
  if (h <= 0 || w <= 0) throw InvalidInput("rasterize_labels: image dimensions must be positive");
  if (border_width < 0) throw InvalidInput("rasterize_labels: border width must be >= 0");
  for (const WordAnnotation& a : annotations) {
    if (!a.box.valid()) throw InvalidInput("rasterize_labels: invalid annotation box");
    if (!a.box.clipped(h, w).valid())
      throw InvalidInput("rasterize_labels: annotation box fully outside image");
  }

  Grid2<std::uint8_t> text_mask(h, w, 0), border_mask(h, w, 0), ignore_mask(h, w, 0);
  for (const WordAnnotation& a : annotations) {
    const BoxI dil = a.box.dilated(border_width).clipped(h, w);
    if (a.ignore) {
      detail::paint_rect(ignore_mask, dil);
      continue;
    }
    detail::paint_rect(text_mask, a.box.clipped(h, w));
    if (border_width > 0) {
      // Ring = dilated box minus the box itself, painted in four strips.
      const BoxI box = a.box;
      const BoxI strips[4] = {
          {dil.x0, dil.y0, dil.x1, std::min(box.y0, dil.y1)},  // above
          {dil.x0, std::max(box.y1, dil.y0), dil.x1, dil.y1},  // below
          {dil.x0, std::max(box.y0, dil.y0), std::min(box.x0, dil.x1),
           std::min(box.y1, dil.y1)},                          // left
          {std::max(box.x1, dil.x0), std::max(box.y0, dil.y0), dil.x1,
           std::min(box.y1, dil.y1)},                          // right
      };
      for (const BoxI& s : strips) {
        const BoxI clipped = s.clipped(h, w);
        if (clipped.valid()) detail::paint_rect(border_mask, clipped);
      }
    }
  }

  LabelMap out{GridU8(h, w, kBackground), std::move(ignore_mask)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (border_mask.at(y, x))
        out.classes.at(y, x) = kBorder;
      else if (text_mask.at(y, x))
        out.classes.at(y, x) = kText;
    }
  }
  return out;
}

// Per-class pixel counts, ignored pixels excluded.
inline std::array<std::size_t, kNumClasses> class_counts(const LabelMap& labels) {
  if (labels.classes.empty() || !labels.classes.same_dims(labels.ignore_mask))
    throw InvalidInput("class_counts: label map and ignore mask dimensions differ");
  std::array<std::size_t, kNumClasses> counts{};
  for (std::size_t i = 0; i < labels.classes.size(); ++i) {
    if (labels.ignore_mask.data()[i]) continue;
    const std::uint8_t c = labels.classes.data()[i];
    if (c >= kNumClasses) throw InvalidInput("class_counts: class value out of range");
    ++counts[c];
  }
  return counts;
}

inline int classes_present(const std::array<std::size_t, kNumClasses>& counts) {
  int m = 0;
  for (std::size_t n : counts)
    if (n > 0) ++m;
  return m;
}

// ---------------------------------------------------------------------------
// Annotation files: JSON array of {x0, y0, x1, y1, text, ignore}, pixel
// coordinates, half-open boxes. Detections reuse the schema with text "".
// ---------------------------------------------------------------------------

inline nlohmann::json annotation_to_json(const WordAnnotation& a) {
  return {{"x0", a.box.x0}, {"y0", a.box.y0}, {"x1", a.box.x1},
          {"y1", a.box.y1}, {"text", a.text}, {"ignore", a.ignore}};
}

inline void write_annotations(const std::string& path, std::span<const WordAnnotation> annotations) {
  nlohmann::json arr = nlohmann::json::array();
  for (const WordAnnotation& a : annotations) arr.push_back(annotation_to_json(a));
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError(path + ": cannot open for writing");
  os << arr.dump(2) << "\n";
  if (!os) throw IoError(path + ": write failed");
}

inline std::vector<WordAnnotation> read_annotations(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(path + ": cannot open");
  nlohmann::json arr;
  try {
    is >> arr;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": malformed JSON (" + e.what() + ")");
  }
  if (!arr.is_array()) throw IoError(path + ": expected a JSON array of annotations");
  std::vector<WordAnnotation> out;
  out.reserve(arr.size());
  for (const nlohmann::json& j : arr) {
    if (!j.is_object() || !j.contains("x0") || !j.contains("y0") || !j.contains("x1") ||
        !j.contains("y1") || !j.contains("text") || !j.contains("ignore") ||
        !j["x0"].is_number_integer() || !j["y0"].is_number_integer() ||
        !j["x1"].is_number_integer() || !j["y1"].is_number_integer() ||
        !j["text"].is_string() || !j["ignore"].is_boolean())
      throw IoError(path + ": annotation entry does not match schema");
    WordAnnotation a;
    a.box = {j["x0"].get<int>(), j["y0"].get<int>(), j["x1"].get<int>(), j["y1"].get<int>()};
    a.text = j["text"].get<std::string>();
    a.ignore = j["ignore"].get<bool>();
    if (!a.box.valid()) throw IoError(path + ": annotation with empty or inverted box");
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace wf
