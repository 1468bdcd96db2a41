#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wordfence/error.hpp"
#include "wordfence/grid.hpp"
#include "wordfence/labelgen.hpp"
#include "wordfence/rng.hpp"

// Seeded synthetic scene generator. Scenes are mid-gray images; each word
// is a burst of dark vertical/horizontal strokes (a glyph-like texture)
// drawn directly on that background, plus additive Gaussian noise. Pixels
// between strokes inside a word and pixels in the gap between words share
// the same gray value, so telling them apart takes surrounding context --
// the regime where an explicit border class earns its keep. Words are laid
// out left to right in text lines; the gap to the next word (and between
// lines) is drawn from [gap_min, gap_max], which keeps every pairwise
// Chebyshev separation at least gap_min while keeping neighbours close
// enough that the rings between them matter. Layout proposals that
// overflow the image are rejected and retried; after 1000 failed attempts
// generation gives up. Word boxes default to near-uniform size so that a
// detection spanning two neighbours cannot keep IoU >= 0.5 with either one:
// w/(2w+gap) < 1/2. Everything is a pure function of the config, so equal
// seeds give bit-identical scenes.

namespace wf {

struct SynthConfig {
  int image_h = 64;
  int image_w = 64;
  int words_min = 2;
  int words_max = 4;
  int word_h_min = 10;
  int word_h_max = 12;
  int word_w_min = 12;
  int word_w_max = 14;
  int gap_min = 3;
  int gap_max = 10;
  double noise_sigma = 0.02;
  double texture = 0.65;  // stroke-coverage budget inside a word, (0, 1]
  std::uint64_t seed = 0;

  void validate() const {
    if (image_h < 4 || image_w < 4) throw InvalidInput("SynthConfig: image too small");
    if (words_min < 1 || words_max < words_min) throw InvalidInput("SynthConfig: bad word counts");
    if (word_h_min < 2 || word_h_max < word_h_min || word_w_min < 2 || word_w_max < word_w_min)
      throw InvalidInput("SynthConfig: bad word size ranges");
    if (gap_min < 1 || gap_max < gap_min) throw InvalidInput("SynthConfig: bad gap range");
    if (noise_sigma < 0.0) throw InvalidInput("SynthConfig: noise sigma must be >= 0");
    if (!(texture > 0.0 && texture <= 1.0)) throw InvalidInput("SynthConfig: texture must be in (0, 1]");
  }
};

struct Scene {
  GridF image;  // H x W x 1, values in [0, 1]
  std::vector<WordAnnotation> annotations;
};

namespace detail {

constexpr double kSceneBackground = 0.5;
constexpr double kWordInk = 0.05;
constexpr int kPlacementRetries = 1000;
constexpr int kSceneMargin = 1;

// First k entries of a seeded permutation of 0..n-1 (partial Fisher-Yates).
inline std::vector<int> sample_positions(Rng& rng, int n, int k) {
  if (n <= 0 || k <= 0) return {};
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  k = std::min(k, n);
  for (int i = 0; i < k; ++i)
    std::swap(pool[static_cast<std::size_t>(i)],
              pool[static_cast<std::size_t>(rng.next_int(i, n - 1))]);
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

// One line-packing proposal; returns false when it overflows the image.
// Lines get more leading than word spacing (like real typography, where
// leading exceeds inter-word gaps), so the tight gaps all sit between
// horizontal neighbours.
inline bool propose_layout(const SynthConfig& cfg, Rng& rng, std::vector<BoxI>& boxes) {
  boxes.clear();
  const int n = rng.next_int(cfg.words_min, cfg.words_max);
  const int lead_lo = std::max(cfg.gap_min, 8);
  const int lead_hi = std::max(cfg.gap_max, lead_lo);
  int y = kSceneMargin + rng.next_int(0, 2);
  int x = kSceneMargin + rng.next_int(0, 2);
  int line_height = 0;
  for (int i = 0; i < n; ++i) {
    const int wh = rng.next_int(cfg.word_h_min, cfg.word_h_max);
    const int ww = rng.next_int(cfg.word_w_min, cfg.word_w_max);
    if (x + ww + kSceneMargin > cfg.image_w && line_height > 0) {
      y += line_height + rng.next_int(lead_lo, lead_hi);
      x = kSceneMargin + rng.next_int(0, 2);
      line_height = 0;
    }
    if (x + ww + kSceneMargin > cfg.image_w) return false;
    if (y + wh + kSceneMargin > cfg.image_h) return false;
    boxes.push_back({x, y, x + ww, y + wh});
    line_height = std::max(line_height, wh);
    x += ww + rng.next_int(cfg.gap_min, cfg.gap_max);
  }
  return true;
}

inline int chebyshev_gap(const BoxI& a, const BoxI& b) {
  const int gx = std::max({0, b.x0 - a.x1, a.x0 - b.x1});
  const int gy = std::max({0, b.y0 - a.y1, a.y0 - b.y1});
  return std::max(gx, gy);
}

inline std::string random_word(Rng& rng) {
  const int len = rng.next_int(2, 8);
  std::string s(static_cast<std::size_t>(len), 'a');
  for (char& c : s) c = static_cast<char>('a' + rng.next_int(0, 25));
  return s;
}

}  // namespace detail

inline Scene generate_scene(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);

  std::vector<BoxI> boxes;
  bool placed = false;
  for (int attempt = 0; attempt < detail::kPlacementRetries; ++attempt) {
    if (!detail::propose_layout(config, rng, boxes)) continue;
    bool ok = true;
    for (std::size_t i = 0; i < boxes.size() && ok; ++i)
      for (std::size_t j = i + 1; j < boxes.size() && ok; ++j)
        if (detail::chebyshev_gap(boxes[i], boxes[j]) < config.gap_min) ok = false;
    if (ok) {
      placed = true;
      break;
    }
  }
  if (!placed)
    throw GenerationError("generate_scene: could not place words within the retry budget");

  Scene scene;
  scene.image = GridF(config.image_h, config.image_w, 1, detail::kSceneBackground);
  for (const BoxI& b : boxes) {
    // Vertical strokes take ~70% of the coverage budget, horizontal the
    // rest; columns/rows are drawn without replacement so the coverage is
    // what the budget says.  Stems are pinned at both box edges so a word's
    // visible extent matches its annotation.
    const int kv = std::max(2, static_cast<int>(std::lround(0.7 * config.texture * b.width())));
    const int kh = static_cast<int>(std::lround(0.3 * config.texture * b.height()));
    std::vector<int> cols{0};
    if (b.width() > 1) cols.push_back(b.width() - 1);
    for (const int c : detail::sample_positions(rng, b.width() - 2, kv - static_cast<int>(cols.size())))
      cols.push_back(c + 1);
    for (const int col : cols)
      for (int y = b.y0; y < b.y1; ++y) scene.image.at(y, b.x0 + col, 0) = detail::kWordInk;
    for (const int row : detail::sample_positions(rng, b.height(), kh))
      for (int x = b.x0; x < b.x1; ++x) scene.image.at(b.y0 + row, x, 0) = detail::kWordInk;
  }
  if (config.noise_sigma > 0.0) {
    for (double& v : scene.image.data())
      v = std::clamp(v + config.noise_sigma * rng.next_gauss(), 0.0, 1.0);
  }

  scene.annotations.reserve(boxes.size());
  for (const BoxI& b : boxes) scene.annotations.push_back({b, detail::random_word(rng), false});
  return scene;
}

}  // namespace wf
