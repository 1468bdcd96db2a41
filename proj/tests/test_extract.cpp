#include <algorithm>
#include <tuple>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "wordfence/extract.hpp"

namespace {

wf::GridU8 grid_from(std::initializer_list<std::uint8_t> values, int h, int w) {
  wf::GridU8 g(h, w);
  std::size_t i = 0;
  for (std::uint8_t v : values) g.data()[i++] = v;
  return g;
}

TEST(Components, TwoBlobsSplitByBorderColumn) {
  // text | border | text across each row
  const wf::GridU8 g = grid_from({1, 2, 1,
                                  1, 2, 1,
                                  1, 2, 1},
                                 3, 3);
  const wf::ComponentMap cm = wf::connected_components(g, wf::kText);
  EXPECT_EQ(cm.count, 2u);
  EXPECT_EQ(cm.ids.at(0, 0), 1u);  // raster discovery order
  EXPECT_EQ(cm.ids.at(0, 2), 2u);
  EXPECT_EQ(cm.ids.at(1, 1), 0u);
  ASSERT_EQ(cm.stats.size(), 2u);
  EXPECT_EQ(cm.stats[0].pixels, 3u);
  EXPECT_EQ(cm.stats[0].bounds, (wf::BoxI{0, 0, 1, 3}));
  EXPECT_EQ(cm.stats[1].bounds, (wf::BoxI{2, 0, 3, 3}));
}

TEST(Components, DiagonalPixelsSeparateUnder4Connectivity) {
  const wf::GridU8 g = grid_from({1, 0,
                                  0, 1},
                                 2, 2);
  EXPECT_EQ(wf::connected_components(g, wf::kText, 4).count, 2u);
  EXPECT_EQ(wf::connected_components(g, wf::kText, 8).count, 1u);
}

TEST(Components, AllBackgroundGivesNone) {
  const wf::GridU8 g(5, 5, wf::kBackground);
  const wf::ComponentMap cm = wf::connected_components(g, wf::kText);
  EXPECT_EQ(cm.count, 0u);
  EXPECT_TRUE(cm.stats.empty());
  for (auto id : cm.ids.data()) EXPECT_EQ(id, 0u);
}

TEST(Components, PixelCountsSumToClassTotal) {
  wf::Rng rng(71);
  const wf::LabelMap m = testutil::random_labels(rng, 24, 24, 3);
  const wf::ComponentMap cm = wf::connected_components(m.classes, wf::kText);
  std::size_t text_pixels = 0;
  for (auto v : m.classes.data()) text_pixels += (v == wf::kText);
  std::size_t comp_pixels = 0;
  for (const wf::ComponentStats& s : cm.stats) comp_pixels += s.pixels;
  EXPECT_EQ(comp_pixels, text_pixels);
}

TEST(Components, MatchesUnionFindOracle) {
  wf::Rng rng(72);
  for (int trial = 0; trial < 50; ++trial) {
    wf::GridU8 g(32, 32, wf::kBackground);
    for (auto& v : g.data())
      if (rng.next_unit() < 0.4) v = wf::kText;
    for (int connectivity : {4, 8}) {
      const wf::ComponentMap got = wf::connected_components(g, wf::kText, connectivity);
      const wf::GridU32 ref = oracle::components(g, wf::kText, connectivity);
      ASSERT_EQ(oracle::normalize_ids(got.ids), oracle::normalize_ids(ref))
          << "trial " << trial << " connectivity " << connectivity;
    }
  }
}

TEST(Components, BadConnectivityRejected) {
  const wf::GridU8 g(2, 2, wf::kText);
  EXPECT_THROW(wf::connected_components(g, wf::kText, 6), wf::InvalidInput);
}

TEST(Boxes, TightBoxForRectangle) {
  wf::GridU8 g(32, 32, wf::kBackground);
  for (int y = 10; y < 16; ++y)
    for (int x = 10; x < 20; ++x) g.at(y, x) = wf::kText;
  const auto boxes = wf::components_to_boxes(wf::connected_components(g, wf::kText));
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0], (wf::BoxI{10, 10, 20, 16}));
}

TEST(Boxes, MinAreaFiltersSmallComponents) {
  wf::GridU8 g(8, 8, wf::kBackground);
  for (int x = 0; x < 4; ++x) g.at(0, x) = wf::kText;  // 4 pixels
  const wf::ComponentMap cm = wf::connected_components(g, wf::kText);
  EXPECT_TRUE(wf::components_to_boxes(cm, 6).empty());
  EXPECT_EQ(wf::components_to_boxes(cm, 4).size(), 1u);
  EXPECT_EQ(wf::components_to_boxes(cm, 0).size(), 1u);
}

TEST(Boxes, LShapeBoundsCoverBothArms) {
  wf::GridU8 g(8, 8, wf::kBackground);
  for (int x = 0; x < 3; ++x) g.at(0, x) = wf::kText;  // (0,0,3,1)
  for (int y = 0; y < 3; ++y) g.at(y, 0) = wf::kText;  // (0,0,1,3)
  const auto boxes = wf::components_to_boxes(wf::connected_components(g, wf::kText), 0);
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0], (wf::BoxI{0, 0, 3, 3}));
}

TEST(Boxes, ExpandClipsAtImageEdge) {
  wf::GridU8 g(10, 10, wf::kBackground);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) g.at(y, x) = wf::kText;
  const auto boxes = wf::components_to_boxes(wf::connected_components(g, wf::kText), 1, 2);
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0], (wf::BoxI{0, 0, 5, 5}));
}

TEST(Boxes, SortedByPosition) {
  wf::GridU8 g(16, 16, wf::kBackground);
  // Deliberately discovered out of (y0, x0) order: the second row blob is
  // wider so its tight box starts left of the first-row blob.
  for (int x = 8; x < 12; ++x) g.at(0, x) = g.at(1, x) = wf::kText;
  for (int x = 2; x < 7; ++x) g.at(5, x) = g.at(6, x) = wf::kText;
  for (int x = 9; x < 14; ++x) g.at(5, x) = g.at(6, x) = wf::kText;
  const auto boxes = wf::components_to_boxes(wf::connected_components(g, wf::kText), 1);
  ASSERT_EQ(boxes.size(), 3u);
  EXPECT_TRUE(std::is_sorted(boxes.begin(), boxes.end(), [](const wf::BoxI& a, const wf::BoxI& b) {
    return std::tie(a.y0, a.x0, a.y1, a.x1) < std::tie(b.y0, b.x0, b.y1, b.x1);
  }));
  EXPECT_EQ(boxes[0], (wf::BoxI{8, 0, 12, 2}));
  EXPECT_EQ(boxes[1], (wf::BoxI{2, 5, 7, 7}));
  EXPECT_EQ(boxes[2], (wf::BoxI{9, 5, 14, 7}));
}

TEST(Boxes, EveryComponentPixelInsideItsBox) {
  wf::Rng rng(73);
  wf::GridU8 g(20, 20, wf::kBackground);
  for (auto& v : g.data())
    if (rng.next_unit() < 0.3) v = wf::kText;
  const wf::ComponentMap cm = wf::connected_components(g, wf::kText);
  for (std::uint32_t id = 1; id <= cm.count; ++id) {
    const wf::BoxI b = cm.stats[id - 1].bounds;
    for (int y = 0; y < 20; ++y)
      for (int x = 0; x < 20; ++x)
        if (cm.ids.at(y, x) == id) EXPECT_TRUE(b.contains(y, x));
  }
}

}  // namespace
