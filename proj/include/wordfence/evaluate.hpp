#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wordfence/error.hpp"
#include "wordfence/grid.hpp"
#include "wordfence/labelgen.hpp"

// Detection scoring. Candidate pairs at or above the IoU threshold are
// matched greedily in descending IoU order (ties broken by detection index,
// then ground-truth index); every detection and every ground truth matches
// at most once. Unmatched detections whose best overlap lands on an ignored
// ground truth are dropped from the counts entirely; remaining unmatched
// detections are false positives and unmatched non-ignored ground truths
// are false negatives.
//
// The end-to-end protocol additionally ignores ground-truth words that are
// three characters or shorter, or contain any non-alphanumeric character,
// and requires case-insensitive transcription equality on top of the box
// match; a box match with the wrong transcription counts as both a false
// positive and a false negative.

namespace wf {

inline double iou(const BoxI& a, const BoxI& b) {
  if (!a.valid() || !b.valid()) throw InvalidInput("iou: invalid box");
  const long long iw = std::max(0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const long long ih = std::max(0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const long long inter = iw * ih;
  const long long uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

struct MatchPair {
  int det = -1;
  int gt = -1;
  double iou = 0.0;
};

struct DetectionReport {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  std::vector<MatchPair> matches;
};

inline DetectionReport summarize_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  DetectionReport r;
  r.true_positives = tp;
  r.false_positives = fp;
  r.false_negatives = fn;
  r.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f_score = (r.precision + r.recall > 0.0)
                  ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                  : 0.0;
  return r;
}

namespace detail {

struct GreedyMatch {
  std::vector<MatchPair> matches;
  std::vector<char> det_matched;
  std::vector<char> gt_matched;
};

inline GreedyMatch greedy_box_match(std::span<const BoxI> dets,
                                    std::span<const WordAnnotation> gts,
                                    std::span<const char> gt_ignored, double iou_thresh) {
  GreedyMatch gm;
  gm.det_matched.assign(dets.size(), 0);
  gm.gt_matched.assign(gts.size(), 0);
  std::vector<MatchPair> candidates;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (gt_ignored[j]) continue;
      const double v = iou(dets[i], gts[j].box);
      if (v >= iou_thresh)
        candidates.push_back({static_cast<int>(i), static_cast<int>(j), v});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const MatchPair& a, const MatchPair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.det != b.det) return a.det < b.det;
    return a.gt < b.gt;
  });
  for (const MatchPair& c : candidates) {
    if (gm.det_matched[c.det] || gm.gt_matched[c.gt]) continue;
    gm.det_matched[c.det] = 1;
    gm.gt_matched[c.gt] = 1;
    gm.matches.push_back(c);
  }
  return gm;
}

// True when an unmatched detection should be dropped: its best overlap over
// all ground truths reaches the threshold on an ignored one.
inline bool absorbed_by_ignored(const BoxI& det, std::span<const WordAnnotation> gts,
                                std::span<const char> gt_ignored, double iou_thresh) {
  double best = 0.0;
  int best_j = -1;
  for (std::size_t j = 0; j < gts.size(); ++j) {
    const double v = iou(det, gts[j].box);
    if (v > best) {
      best = v;
      best_j = static_cast<int>(j);
    }
  }
  return best_j >= 0 && best >= iou_thresh && gt_ignored[best_j];
}

}  // namespace detail

inline DetectionReport match_detections(std::span<const BoxI> dets,
                                        std::span<const WordAnnotation> gts,
                                        double iou_thresh = 0.5) {
  if (!(iou_thresh > 0.0 && iou_thresh <= 1.0))
    throw InvalidInput("match_detections: IoU threshold must be in (0, 1]");
  std::vector<char> ignored(gts.size());
  for (std::size_t j = 0; j < gts.size(); ++j) ignored[j] = gts[j].ignore ? 1 : 0;
  const detail::GreedyMatch gm = detail::greedy_box_match(dets, gts, ignored, iou_thresh);

  std::size_t tp = gm.matches.size(), fp = 0, fn = 0;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (gm.det_matched[i]) continue;
    if (!detail::absorbed_by_ignored(dets[i], gts, ignored, iou_thresh)) ++fp;
  }
  for (std::size_t j = 0; j < gts.size(); ++j)
    if (!ignored[j] && !gm.gt_matched[j]) ++fn;

  DetectionReport r = summarize_counts(tp, fp, fn);
  r.matches = gm.matches;
  return r;
}

struct Detection {
  BoxI box;
  std::string text;
};

namespace detail {

inline std::string ascii_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool all_alnum(const std::string& s) {
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace detail

inline DetectionReport end_to_end_score(std::span<const Detection> dets,
                                        std::span<const WordAnnotation> gts,
                                        double iou_thresh = 0.5) {
  if (!(iou_thresh > 0.0 && iou_thresh <= 1.0))
    throw InvalidInput("end_to_end_score: IoU threshold must be in (0, 1]");
  std::vector<char> ignored(gts.size());
  for (std::size_t j = 0; j < gts.size(); ++j)
    ignored[j] = (gts[j].ignore || gts[j].text.size() <= 3 || !detail::all_alnum(gts[j].text)) ? 1 : 0;

  std::vector<BoxI> boxes(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) boxes[i] = dets[i].box;
  const detail::GreedyMatch gm = detail::greedy_box_match(boxes, gts, ignored, iou_thresh);

  std::size_t tp = 0, fp = 0, fn = 0;
  for (const MatchPair& m : gm.matches) {
    if (detail::ascii_lower(dets[m.det].text) == detail::ascii_lower(gts[m.gt].text))
      ++tp;
    else {
      ++fp;  // wrong reading: the proposal is spurious and the word is missed
      ++fn;
    }
  }
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (gm.det_matched[i]) continue;
    if (!detail::absorbed_by_ignored(boxes[i], gts, ignored, iou_thresh)) ++fp;
  }
  for (std::size_t j = 0; j < gts.size(); ++j)
    if (!ignored[j] && !gm.gt_matched[j]) ++fn;

  DetectionReport r = summarize_counts(tp, fp, fn);
  r.matches = gm.matches;
  return r;
}

// ---------------------------------------------------------------------------
// Report serialization.
// ---------------------------------------------------------------------------

inline nlohmann::json report_to_json(const DetectionReport& r) {
  return {{"tp", r.true_positives},   {"fp", r.false_positives}, {"fn", r.false_negatives},
          {"precision", r.precision}, {"recall", r.recall},      {"fscore", r.f_score}};
}

inline void write_report(const std::string& path, const DetectionReport& r) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError(path + ": cannot open for writing");
  os << report_to_json(r).dump(2) << "\n";
  if (!os) throw IoError(path + ": write failed");
}

}  // namespace wf
