#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "wordfence/checkpoint.hpp"
#include "wordfence/error.hpp"
#include "wordfence/evaluate.hpp"
#include "wordfence/extract.hpp"
#include "wordfence/fusion.hpp"
#include "wordfence/io.hpp"
#include "wordfence/labelgen.hpp"
#include "wordfence/overlay.hpp"

// End-to-end detection over a corpus: checkpoint -> multi-scale inference ->
// vote fusion -> connected components -> boxes, with per-image artifacts
// (fused label map, box JSON, optional overlay) and a corpus-level report.
// A failing image is recorded and skipped so the rest of the corpus still
// runs; callers decide the exit status from `failures`.

namespace wf {

struct PipelineConfig {
  std::string checkpoint_path;
  std::vector<std::string> image_paths;
  std::vector<std::string> annotation_paths;  // empty, or one per image
  std::string out_dir;
  int border_width = 8;
  ScaleSet scales;
  int min_area = 6;
  int expand = 0;
  double iou_thresh = 0.5;
  bool write_overlays = false;

  void validate() const {
    if (checkpoint_path.empty()) throw InvalidInput("PipelineConfig: checkpoint path required");
    if (out_dir.empty()) throw InvalidInput("PipelineConfig: output directory required");
    if (!annotation_paths.empty() && annotation_paths.size() != image_paths.size())
      throw InvalidInput("PipelineConfig: annotation count does not match image count");
    if (min_area < 1) throw InvalidInput("PipelineConfig: min_area must be >= 1");
    if (expand < 0) throw InvalidInput("PipelineConfig: expand must be >= 0");
    if (!(iou_thresh > 0.0 && iou_thresh <= 1.0))
      throw InvalidInput("PipelineConfig: iou threshold must be in (0, 1]");
    scales.validate();
  }
};

struct PipelineResult {
  DetectionReport report;
  std::vector<std::string> failures;  // "path: what went wrong"
  int images_processed = 0;
};

namespace detail {

inline std::string artifact_stem(const std::string& image_path) {
  return std::filesystem::path(image_path).stem().string();
}

inline void write_boxes_json(const std::string& path, const std::vector<BoxI>& boxes) {
  std::vector<WordAnnotation> anns;
  anns.reserve(boxes.size());
  for (const BoxI& b : boxes) anns.push_back({b, "", false});
  write_annotations(path, anns);
}

}  // namespace detail

inline PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  const NetworkParams params = load_checkpoint(config.checkpoint_path);
  std::filesystem::create_directories(config.out_dir);

  PipelineResult result;
  const bool have_gt = !config.annotation_paths.empty();

  for (std::size_t i = 0; i < config.image_paths.size(); ++i) {
    const std::string& img_path = config.image_paths[i];
    try {
      const GridF image = u8_to_gray(read_pgm(img_path));
      const std::vector<GridF> prob_maps = infer_multiscale(params, image, config.scales);
      const GridU8 fused = fuse_votes(prob_maps, image.height(), image.width());
      const ComponentMap comps = connected_components(fused, kText);
      const std::vector<BoxI> boxes = components_to_boxes(comps, config.min_area, config.expand);

      const std::filesystem::path out(config.out_dir);
      const std::string stem = detail::artifact_stem(img_path);
      write_pgm((out / (stem + "_labels.pgm")).string(), fused);
      detail::write_boxes_json((out / (stem + "_boxes.json")).string(), boxes);
      if (config.write_overlays)
        write_ppm((out / (stem + "_overlay.ppm")).string(),
                  render_overlay(image, &fused, boxes));

      if (have_gt) {
        const std::vector<WordAnnotation> gts = read_annotations(config.annotation_paths[i]);
        const DetectionReport r = match_detections(boxes, gts, config.iou_thresh);
        result.report.true_positives += r.true_positives;
        result.report.false_positives += r.false_positives;
        result.report.false_negatives += r.false_negatives;
      }
      ++result.images_processed;
    } catch (const Error& e) {
      result.failures.push_back(img_path + ": " + e.what());
    }
  }

  result.report = summarize_counts(result.report.true_positives, result.report.false_positives,
                                   result.report.false_negatives);
  write_report((std::filesystem::path(config.out_dir) / "report.json").string(), result.report);
  return result;
}

}  // namespace wf
