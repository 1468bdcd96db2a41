// wordfence: word detection by segmenting text from its surrounding border.
//
// Subcommands cover the pipeline stages individually (synth, labelgen,
// train, infer, fuse, extract, eval, overlay) plus an end-to-end `pipeline`
// run. Exit codes: 0 success, 1 usage error, 2 data/IO error, 3 internal
// error. All randomness flows from --seed; repeated runs with the same
// arguments produce byte-identical artifacts.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wordfence/wordfence.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string scene_stem(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%05d", index);
  return buf;
}

wf::GridU8 read_label_pgm(const std::string& path) {
  wf::GridU8 g = wf::read_pgm(path);
  for (std::uint8_t v : g.data())
    if (v >= wf::kNumClasses)
      throw wf::IoError(path + ": pixel value " + std::to_string(v) + " is not a class id");
  return g;
}

// Sorted *.pgm list from a directory, with optional sibling .json annotations.
void collect_dir(const std::string& dir, std::vector<std::string>& images,
                 std::vector<std::string>& annotations, bool want_annotations) {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  for (const fs::path& p : paths) {
    images.push_back(p.string());
    if (want_annotations) {
      fs::path ann = p;
      ann.replace_extension(".json");
      if (!fs::exists(ann)) throw wf::IoError(ann.string() + ": missing annotation file");
      annotations.push_back(ann.string());
    }
  }
}

struct SceneFilePair {
  std::string image;
  std::string annotations;
};

std::vector<SceneFilePair> load_scene_pairs(const std::vector<std::string>& images,
                                            const std::vector<std::string>& annotations) {
  if (images.size() != annotations.size())
    throw wf::InvalidInput("image and annotation lists must have equal length");
  std::vector<SceneFilePair> out;
  for (std::size_t i = 0; i < images.size(); ++i) out.push_back({images[i], annotations[i]});
  return out;
}

int cmd_synth(const std::string& out_dir, int count, wf::SynthConfig cfg) {
  fs::create_directories(out_dir);
  json manifest{{"count", count},
                {"seed", cfg.seed},
                {"image_h", cfg.image_h},
                {"image_w", cfg.image_w},
                {"scenes", json::array()}};
  const std::uint64_t base_seed = cfg.seed;
  for (int i = 0; i < count; ++i) {
    cfg.seed = wf::Rng::derive(base_seed, static_cast<std::uint64_t>(i));
    const wf::Scene scene = wf::generate_scene(cfg);
    const std::string stem = scene_stem(i);
    const std::string img_path = (fs::path(out_dir) / (stem + ".pgm")).string();
    const std::string ann_path = (fs::path(out_dir) / (stem + ".json")).string();
    wf::write_pgm(img_path, wf::gray_to_u8(scene.image));
    wf::write_annotations(ann_path, scene.annotations);
    manifest["scenes"].push_back({{"image", stem + ".pgm"}, {"annotations", stem + ".json"}});
  }
  std::ofstream ms(fs::path(out_dir) / "manifest.json");
  if (!ms) throw wf::IoError(out_dir + "/manifest.json: cannot open for writing");
  ms << manifest.dump(2) << "\n";
  std::cout << "wrote " << count << " scene(s) to " << out_dir << "\n";
  return 0;
}

int cmd_labelgen(const std::string& image_path, const std::string& ann_path,
                 const std::string& out_path, const std::string& ignore_out, int border_width) {
  const wf::GridU8 img = wf::read_pgm(image_path);
  const std::vector<wf::WordAnnotation> anns = wf::read_annotations(ann_path);
  const wf::LabelMap labels =
      wf::rasterize_labels(anns, img.height(), img.width(), border_width);
  wf::write_pgm(out_path, labels.classes);
  if (!ignore_out.empty()) wf::write_pgm(ignore_out, labels.ignore_mask);
  const auto counts = wf::class_counts(labels);
  json j{{"background", counts[wf::kBackground]},
         {"text", counts[wf::kText]},
         {"border", counts[wf::kBorder]}};
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_train(const std::vector<std::string>& images, const std::vector<std::string>& annotations,
              const std::string& data_dir, const std::string& out_path, int border_width,
              const wf::TrainConfig& config) {
  std::vector<std::string> imgs = images, anns = annotations;
  if (!data_dir.empty()) collect_dir(data_dir, imgs, anns, true);
  const std::vector<SceneFilePair> pairs = load_scene_pairs(imgs, anns);
  if (pairs.empty()) throw wf::InvalidInput("train: no training images given");

  std::vector<wf::TrainSample> dataset;
  dataset.reserve(pairs.size());
  for (const SceneFilePair& p : pairs) {
    const wf::GridU8 raw = wf::read_pgm(p.image);
    wf::TrainSample s;
    s.image = wf::u8_to_gray(raw);
    s.labels = wf::rasterize_labels(wf::read_annotations(p.annotations), raw.height(),
                                    raw.width(), border_width);
    dataset.push_back(std::move(s));
  }

  const wf::TrainResult result = wf::train(dataset, config);
  const std::string log_path = out_path + ".losses.csv";
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw wf::IoError(log_path + ": cannot open for writing");
  log << "epoch,mean_loss\n";
  for (std::size_t e = 0; e < result.epoch_mean_loss.size(); ++e) {
    std::cout << "epoch " << (e + 1) << " mean loss " << result.epoch_mean_loss[e] << "\n";
    log << (e + 1) << "," << result.epoch_mean_loss[e] << "\n";
  }
  wf::save_checkpoint(out_path, result.params, config.seed, &config);
  std::cout << "checkpoint written to " << out_path << "\n";
  return 0;
}

int cmd_infer(const std::string& checkpoint, const std::string& image_path,
              const std::string& out_prefix, const wf::ScaleSet& scales) {
  const wf::NetworkParams params = wf::load_checkpoint(checkpoint);
  const wf::GridF image = wf::u8_to_gray(wf::read_pgm(image_path));
  const std::vector<wf::GridF> maps = wf::infer_multiscale(params, image, scales);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const std::string path = out_prefix + std::to_string(i) + ".ften";
    wf::write_ften(path, maps[i]);
    std::cout << path << " " << maps[i].height() << "x" << maps[i].width() << "x"
              << maps[i].channels() << "\n";
  }
  return 0;
}

int cmd_fuse(const std::vector<std::string>& map_paths, int target_h, int target_w,
             const std::string& out_path) {
  std::vector<wf::GridF> maps;
  maps.reserve(map_paths.size());
  for (const std::string& p : map_paths) maps.push_back(wf::read_ften(p));
  const wf::GridU8 fused = wf::fuse_votes(maps, target_h, target_w);
  wf::write_pgm(out_path, fused);
  return 0;
}

int cmd_extract(const std::string& labels_path, const std::string& out_path, int min_area,
                int expand, int target_class) {
  const wf::GridU8 labels = read_label_pgm(labels_path);
  const wf::ComponentMap comps =
      wf::connected_components(labels, static_cast<std::uint8_t>(target_class));
  const std::vector<wf::BoxI> boxes = wf::components_to_boxes(comps, min_area, expand);
  std::vector<wf::WordAnnotation> anns;
  anns.reserve(boxes.size());
  for (const wf::BoxI& b : boxes) anns.push_back({b, "", false});
  wf::write_annotations(out_path, anns);
  std::cout << boxes.size() << " box(es) -> " << out_path << "\n";
  return 0;
}

int cmd_eval(const std::vector<std::string>& det_paths, const std::vector<std::string>& gt_paths,
             double iou, bool end_to_end, const std::string& out_path,
             const std::string& csv_path) {
  if (det_paths.size() != gt_paths.size())
    throw wf::InvalidInput("eval: detection and truth lists must pair up");
  std::ofstream csv;
  if (!csv_path.empty()) {
    csv.open(csv_path, std::ios::binary);
    if (!csv) throw wf::IoError(csv_path + ": cannot open for writing");
    csv << "detections,truth,tp,fp,fn\n";
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < det_paths.size(); ++i) {
    const std::vector<wf::WordAnnotation> dets = wf::read_annotations(det_paths[i]);
    const std::vector<wf::WordAnnotation> gts = wf::read_annotations(gt_paths[i]);
    wf::DetectionReport r;
    if (end_to_end) {
      std::vector<wf::Detection> d;
      d.reserve(dets.size());
      for (const wf::WordAnnotation& a : dets) d.push_back({a.box, a.text});
      r = wf::end_to_end_score(d, gts, iou);
    } else {
      std::vector<wf::BoxI> d;
      d.reserve(dets.size());
      for (const wf::WordAnnotation& a : dets) d.push_back(a.box);
      r = wf::match_detections(d, gts, iou);
    }
    if (csv.is_open())
      csv << det_paths[i] << "," << gt_paths[i] << "," << r.true_positives << ","
          << r.false_positives << "," << r.false_negatives << "\n";
    tp += r.true_positives;
    fp += r.false_positives;
    fn += r.false_negatives;
  }
  const wf::DetectionReport total = wf::summarize_counts(tp, fp, fn);
  const json j = wf::report_to_json(total);
  if (!out_path.empty()) wf::write_report(out_path, total);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_pipeline(const wf::PipelineConfig& config) {
  const wf::PipelineResult result = wf::run_pipeline(config);
  if (!config.annotation_paths.empty())
    std::cout << wf::report_to_json(result.report).dump(2) << "\n";
  std::cout << "processed " << result.images_processed << " image(s), artifacts in "
            << config.out_dir << "\n";
  if (!result.failures.empty()) {
    for (const std::string& f : result.failures) std::cerr << "failed: " << f << "\n";
    return 2;
  }
  return 0;
}

int cmd_overlay(const std::string& image_path, const std::string& labels_path,
                const std::string& boxes_path, const std::string& out_path) {
  const wf::GridF image = wf::u8_to_gray(wf::read_pgm(image_path));
  wf::GridU8 labels;
  if (!labels_path.empty()) labels = read_label_pgm(labels_path);
  std::vector<wf::BoxI> boxes;
  if (!boxes_path.empty())
    for (const wf::WordAnnotation& a : wf::read_annotations(boxes_path)) boxes.push_back(a.box);
  const wf::RgbImage rgb =
      wf::render_overlay(image, labels_path.empty() ? nullptr : &labels, boxes);
  wf::write_ppm(out_path, rgb);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wordfence: word detection via border-class segmentation"};
  app.require_subcommand(1);

  // synth ---------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate synthetic word scenes");
  std::string synth_out;
  int synth_count = 1;
  wf::SynthConfig synth_cfg;
  synth->add_option("--out-dir", synth_out, "output directory")->required();
  synth->add_option("--count", synth_count, "number of scenes")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_cfg.seed, "base RNG seed");
  synth->add_option("--image-height", synth_cfg.image_h, "scene height");
  synth->add_option("--image-width", synth_cfg.image_w, "scene width");
  synth->add_option("--words-min", synth_cfg.words_min, "minimum words per scene");
  synth->add_option("--words-max", synth_cfg.words_max, "maximum words per scene");
  synth->add_option("--gap-min", synth_cfg.gap_min, "minimum gap between words (px)");
  synth->add_option("--gap-max", synth_cfg.gap_max, "maximum layout gap between words (px)");
  synth->add_option("--noise-sigma", synth_cfg.noise_sigma, "additive Gaussian noise sigma");
  synth->add_option("--texture", synth_cfg.texture, "stroke coverage inside words");

  // labelgen --------------------------------------------------------------
  auto* labelgen = app.add_subcommand("labelgen", "rasterize annotations to class labels");
  std::string lg_image, lg_ann, lg_out, lg_ignore_out;
  int lg_border = 8;
  labelgen->add_option("--image", lg_image, "input image (P5)")->required();
  labelgen->add_option("--annotations", lg_ann, "annotation JSON")->required();
  labelgen->add_option("--out", lg_out, "output label map (P5, class ids)")->required();
  labelgen->add_option("--ignore-out", lg_ignore_out, "optional ignore-mask output (P5, 0/1)");
  labelgen->add_option("--border-width", lg_border, "border ring width in pixels")
      ->check(CLI::NonNegativeNumber);

  // train -----------------------------------------------------------------
  auto* train = app.add_subcommand("train", "train the toy segmentation network");
  std::vector<std::string> tr_images, tr_anns;
  std::string tr_dir, tr_out;
  int tr_border = 8;
  wf::TrainConfig tr_cfg;
  train->add_option("--images", tr_images, "training images")->delimiter(',');
  train->add_option("--annotations", tr_anns, "matching annotation files")->delimiter(',');
  train->add_option("--data-dir", tr_dir, "directory of .pgm/.json scene pairs");
  train->add_option("--out", tr_out, "checkpoint output path")->required();
  train->add_option("--border-width", tr_border, "border ring width in pixels")
      ->check(CLI::NonNegativeNumber);
  train->add_option("--epochs", tr_cfg.epochs, "training epochs")->check(CLI::PositiveNumber);
  train->add_option("--learning-rate", tr_cfg.learning_rate, "SGD learning rate");
  train->add_option("--batch", tr_cfg.batch, "images per SGD step")->check(CLI::PositiveNumber);
  train->add_option("--seed", tr_cfg.seed, "RNG seed for weight init");
  train->add_option("--weight-init-scale", tr_cfg.weight_init_scale,
                    "uniform weight init half-range");

  // infer -------------------------------------------------------------
  auto* infer = app.add_subcommand("infer", "run multi-scale inference");
  std::string in_ckpt, in_image, in_prefix;
  std::vector<double> in_scales{0.5, 1.0, 2.0};
  infer->add_option("--checkpoint", in_ckpt, "checkpoint path")->required();
  infer->add_option("--image", in_image, "input image (P5)")->required();
  infer->add_option("--out-prefix", in_prefix, "probability map path prefix")->required();
  infer->add_option("--scales", in_scales, "inference scale factors")->delimiter(',');

  // fuse --------------------------------------------------------------
  auto* fuse = app.add_subcommand("fuse", "fuse probability maps by voting");
  std::vector<std::string> fu_maps;
  int fu_h = 0, fu_w = 0;
  std::string fu_out;
  fuse->add_option("--maps", fu_maps, "probability maps (FTEN)")->required()->delimiter(',');
  fuse->add_option("--target-height", fu_h, "fused map height")->required();
  fuse->add_option("--target-width", fu_w, "fused map width")->required();
  fuse->add_option("--out", fu_out, "output label map (P5)")->required();

  // extract -----------------------------------------------------------
  auto* extract = app.add_subcommand("extract", "extract boxes from a label map");
  std::string ex_labels, ex_out;
  int ex_min_area = 6, ex_expand = 0, ex_class = wf::kText;
  extract->add_option("--labels", ex_labels, "label map (P5, class ids)")->required();
  extract->add_option("--out", ex_out, "output boxes JSON")->required();
  extract->add_option("--min-area", ex_min_area, "minimum component pixel count")
      ->check(CLI::PositiveNumber);
  extract->add_option("--expand", ex_expand, "box expansion in pixels")
      ->check(CLI::NonNegativeNumber);
  extract->add_option("--class", ex_class, "class id to extract")->check(CLI::Range(0, 2));

  // eval ----------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "score detections against ground truth");
  std::vector<std::string> ev_dets, ev_gts;
  double ev_iou = 0.5;
  bool ev_e2e = false;
  std::string ev_out;
  eval->add_option("--detections", ev_dets, "detection JSON files")->required()->delimiter(',');
  eval->add_option("--truth", ev_gts, "ground-truth JSON files")->required()->delimiter(',');
  std::string ev_csv;
  eval->add_option("--iou", ev_iou, "IoU match threshold");
  eval->add_flag("--end-to-end", ev_e2e, "also require case-insensitive transcription match");
  eval->add_option("--out", ev_out, "optional report JSON output path");
  eval->add_option("--csv", ev_csv, "optional per-image breakdown CSV path");

  // pipeline ------------------------------------------------------------
  auto* pipeline = app.add_subcommand("pipeline", "checkpoint + images -> boxes and report");
  wf::PipelineConfig pl_cfg;
  std::string pl_images_dir;
  bool pl_overlays = false;
  pipeline->add_option("--checkpoint", pl_cfg.checkpoint_path, "checkpoint path")->required();
  pipeline->add_option("--images", pl_cfg.image_paths, "input images (P5)")->delimiter(',');
  pipeline->add_option("--annotations", pl_cfg.annotation_paths, "ground-truth JSON files")
      ->delimiter(',');
  pipeline->add_option("--images-dir", pl_images_dir,
                       "directory of .pgm images (with .json annotations if present)");
  pipeline->add_option("--out-dir", pl_cfg.out_dir, "artifact output directory")->required();
  pipeline->add_option("--border-width", pl_cfg.border_width, "border ring width in pixels")
      ->check(CLI::NonNegativeNumber);
  pipeline->add_option("--scales", pl_cfg.scales.scales, "inference scale factors")
      ->delimiter(',');
  pipeline->add_option("--min-area", pl_cfg.min_area, "minimum component pixel count")
      ->check(CLI::PositiveNumber);
  pipeline->add_option("--expand", pl_cfg.expand, "box expansion in pixels")
      ->check(CLI::NonNegativeNumber);
  pipeline->add_option("--iou", pl_cfg.iou_thresh, "IoU match threshold");
  pipeline->add_flag("--overlays", pl_overlays, "write overlay images");

  // overlay -------------------------------------------------------------
  auto* overlay = app.add_subcommand("overlay", "render labels and boxes over an image");
  std::string ov_image, ov_labels, ov_boxes, ov_out;
  overlay->add_option("--image", ov_image, "input image (P5)")->required();
  overlay->add_option("--labels", ov_labels, "optional label map (P5, class ids)");
  overlay->add_option("--boxes", ov_boxes, "optional boxes JSON");
  overlay->add_option("--out", ov_out, "output image (P6)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_out, synth_count, synth_cfg);
    if (labelgen->parsed()) return cmd_labelgen(lg_image, lg_ann, lg_out, lg_ignore_out, lg_border);
    if (train->parsed()) return cmd_train(tr_images, tr_anns, tr_dir, tr_out, tr_border, tr_cfg);
    if (infer->parsed()) return cmd_infer(in_ckpt, in_image, in_prefix, {in_scales});
    if (fuse->parsed()) return cmd_fuse(fu_maps, fu_h, fu_w, fu_out);
    if (extract->parsed()) return cmd_extract(ex_labels, ex_out, ex_min_area, ex_expand, ex_class);
    if (eval->parsed()) return cmd_eval(ev_dets, ev_gts, ev_iou, ev_e2e, ev_out, ev_csv);
    if (pipeline->parsed()) {
      if (!pl_images_dir.empty())
        collect_dir(pl_images_dir, pl_cfg.image_paths, pl_cfg.annotation_paths, true);
      pl_cfg.write_overlays = pl_overlays;
      return cmd_pipeline(pl_cfg);
    }
    if (overlay->parsed()) return cmd_overlay(ov_image, ov_labels, ov_boxes, ov_out);
    std::cerr << "no subcommand given\n";
    return 1;
  } catch (const wf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
