#include "mfd/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfd/assignment.hpp"
#include "mfd/config.hpp"
#include "mfd/eval.hpp"
#include "mfd/gfl_decode.hpp"
#include "mfd/io.hpp"
#include "mfd/postprocess.hpp"
#include "mfd/pyramid.hpp"
#include "mfd/simd/box_kernels.hpp"

namespace mfd {
namespace {

// Records grouped by page, pages in order of first appearance.
template <typename T, typename PageOf>
std::vector<std::pair<std::string, std::vector<T>>> group_by_page(const std::vector<T>& items,
                                                                  PageOf page_of) {
  std::vector<std::pair<std::string, std::vector<T>>> pages;
  std::unordered_map<std::string, std::size_t> index;
  for (const T& item : items) {
    const std::string& page = page_of(item);
    auto [it, fresh] = index.emplace(page, pages.size());
    if (fresh) pages.emplace_back(page, std::vector<T>{});
    pages[it->second].second.push_back(item);
  }
  return pages;
}

std::vector<Detection> detections_of(const std::vector<PredictionRecord>& records) {
  std::vector<Detection> dets;
  dets.reserve(records.size());
  for (const PredictionRecord& r : records) dets.push_back(r.det);
  return dets;
}

auto page_of_record = [](const PredictionRecord& r) -> const std::string& { return r.page_id; };

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + out_path + "'");
  f << text;
}

struct Options {
  RunConfig cfg;
  std::string levels = "2-6";
  std::string out_path;
  std::string gt_path;
  std::string pred_path;
  std::string flipped_path;
  std::string json_path;
  std::string decode_path;
  std::vector<std::string> fuse_paths;
  std::vector<double> weights;
  double clip_width = 0.0;
  double clip_height = 0.0;
  double nms_iou = kDefaultNmsIou;
  double flip_iou = kDefaultNmsIou;
  double wbf_iou = kDefaultWbfIou;
  double eval_iou = kDefaultEvalIou;
  std::string simd = "auto";
};

std::string run_eval(const Options& o) {
  const auto gts = parse_gt(std::filesystem::path(o.gt_path));
  const auto preds = parse_preds(std::filesystem::path(o.pred_path));
  const EvalReport report = evaluate(preds, gts, o.eval_iou);
  if (!o.json_path.empty()) {
    std::ofstream f(o.json_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + o.json_path + "'");
    f << report_to_json(report, true);
  }
  return format_report(report);
}

std::string run_nms(const Options& o) {
  const auto preds = parse_preds(std::filesystem::path(o.pred_path));
  std::ostringstream s;
  for (const auto& [page, records] : group_by_page(preds, page_of_record)) {
    const auto dets = score_filter(detections_of(records), o.cfg.min_score);
    for (const Detection& d : nms(dets, o.nms_iou)) s << prediction_json(page, d) << '\n';
  }
  return s.str();
}

std::string run_flip_merge(const Options& o) {
  const auto preds = parse_preds(std::filesystem::path(o.pred_path));
  const auto flipped = parse_preds(std::filesystem::path(o.flipped_path));
  // Pages of the original pass first, then pages seen only in the flipped pass.
  std::vector<PredictionRecord> all = preds;
  all.insert(all.end(), flipped.begin(), flipped.end());
  std::unordered_map<std::string, std::vector<Detection>> originals, mirrored;
  for (const PredictionRecord& r : preds) originals[r.page_id].push_back(r.det);
  for (const PredictionRecord& r : flipped) mirrored[r.page_id].push_back(r.det);

  std::ostringstream s;
  for (const auto& [page, unused] : group_by_page(all, page_of_record)) {
    const auto dets = score_filter(originals[page], o.cfg.min_score);
    const auto fdets = score_filter(mirrored[page], o.cfg.min_score);
    for (const Detection& d : merge_flip(dets, fdets, o.cfg.image_width, o.flip_iou)) {
      s << prediction_json(page, d) << '\n';
    }
  }
  return s.str();
}

std::string run_fuse(const Options& o) {
  std::vector<std::vector<PredictionRecord>> sets;
  std::vector<std::string> page_order;
  std::unordered_map<std::string, std::size_t> page_index;
  for (const std::string& path : o.fuse_paths) {
    sets.push_back(parse_preds(std::filesystem::path(path)));
    for (const PredictionRecord& r : sets.back()) {
      if (page_index.emplace(r.page_id, page_order.size()).second) page_order.push_back(r.page_id);
    }
  }
  // per_page[p][m] = detections of model m on page p.
  std::vector<std::vector<std::vector<Detection>>> per_page(
      page_order.size(), std::vector<std::vector<Detection>>(sets.size()));
  for (std::size_t m = 0; m < sets.size(); ++m) {
    for (const PredictionRecord& r : sets[m]) {
      if (r.det.score >= o.cfg.min_score) per_page[page_index[r.page_id]][m].push_back(r.det);
    }
  }
  std::optional<std::vector<double>> weights;
  if (!o.weights.empty()) weights = o.weights;
  std::ostringstream s;
  for (std::size_t p = 0; p < page_order.size(); ++p) {
    for (const FusedDetection& f : wbf(per_page[p], o.wbf_iou, weights)) {
      s << prediction_json(page_order[p], f.det, f.cluster_size) << '\n';
    }
  }
  return s.str();
}

std::string run_atss_sim(const Options& o) {
  const auto gts = parse_gt(std::filesystem::path(o.gt_path));
  const PyramidSpec spec = o.cfg.pyramid();

  std::vector<std::size_t> random_counts(gts.size(), 0), atss_counts(gts.size(), 0);
  std::unordered_map<std::string, std::vector<std::size_t>> members;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    auto [it, fresh] = members.try_emplace(gts[i].page_id);
    if (fresh) order.push_back(gts[i].page_id);
    it->second.push_back(i);
  }
  for (const std::string& page : order) {
    const auto& idx = members[page];
    std::vector<Box> boxes;
    for (const std::size_t i : idx) boxes.push_back(gts[i].box);
    const auto rnd = random_assign(boxes, spec, o.cfg.image_width, o.cfg.image_height);
    const auto atss =
        atss_assign(boxes, spec, o.cfg.image_width, o.cfg.image_height, o.cfg.atss_k);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      random_counts[idx[j]] = rnd.instances[j].positive_count();
      atss_counts[idx[j]] = atss.instances[j].positive_count();
    }
  }

  std::vector<Box> all_boxes;
  AssignmentResult pooled_random, pooled_atss;
  std::vector<ImbalanceRow> rows;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    all_boxes.push_back(gts[i].box);
    InstanceAssignment r, a;
    r.positives.resize(random_counts[i], GridPoint{0, 0, 0});
    a.positives.resize(atss_counts[i], GridPoint{0, 0, 0});
    pooled_random.instances.push_back(std::move(r));
    pooled_atss.instances.push_back(std::move(a));
    rows.push_back({gts[i].page_id, gts[i].label, area(gts[i].box), random_counts[i],
                    atss_counts[i]});
  }
  const ImbalanceStats sr = imbalance_stats(pooled_random, all_boxes);
  const ImbalanceStats sa = imbalance_stats(pooled_atss, all_boxes);
  std::ostringstream s;
  write_imbalance_csv(s, rows, sr.log_area_count_correlation, sa.log_area_count_correlation);
  return s.str();
}

std::string run_fpn_coverage(const Options& o) {
  const auto gts = parse_gt(std::filesystem::path(o.gt_path));
  std::ostringstream s;
  write_coverage_csv(s, coverage_report(gts, o.cfg.pyramid()));
  return s.str();
}

std::string run_decode(const Options& o) {
  const auto records = parse_decode_records(std::filesystem::path(o.decode_path));
  const PyramidSpec spec = o.cfg.pyramid();
  std::optional<ImageSize> clip;
  if (o.clip_width > 0.0 && o.clip_height > 0.0) clip = ImageSize{o.clip_width, o.clip_height};
  std::ostringstream s;
  for (const DecodeRecord& r : records) {
    Box box;
    try {
      box = decode_box(r.point, r.sides, spec, clip);
    } catch (const std::invalid_argument& e) {
      throw ParseError(o.decode_path, r.line, e.what());
    }
    if (r.label && r.score) {
      s << prediction_json(r.page_id, Detection(box, *r.label, *r.score)) << '\n';
    } else {
      s << "{\"page_id\":" << nlohmann::json(r.page_id).dump() << ",\"level\":" << r.point.level
        << ",\"box\":[" << format_fixed(box.x1()) << ',' << format_fixed(box.y1()) << ','
        << format_fixed(box.x2()) << ',' << format_fixed(box.y2()) << "]}\n";
    }
  }
  return s.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{
      "Post-processing, label-assignment and evaluation toolkit for mathematical "
      "formula detection.",
      "mfd"};
  app.require_subcommand(1);
  app.add_option("--simd", o.simd, "Kernel variant: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
      ->capture_default_str();

  const auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out,-o", o.out_path, "Write results here instead of stdout");
  };
  const auto add_levels = [&](CLI::App* sub) {
    sub->add_option("--levels", o.levels,
                    "Pyramid levels, a range like 2-6 or a list like 2,3,4 "
                    "(default P2-P6: the P3-P7 default misses formulas under 24 px)")
        ->capture_default_str();
  };

  auto* eval_cmd = app.add_subcommand("eval", "Per-class and total precision/recall/F1");
  eval_cmd->add_option("--gt", o.gt_path, "Ground-truth CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--pred", o.pred_path, "Prediction JSONL")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--iou-thresh", o.eval_iou, "Minimum IoU for a match")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  eval_cmd->add_option("--json", o.json_path, "Also write the report as JSON");
  add_out(eval_cmd);

  auto* nms_cmd = app.add_subcommand("nms", "Greedy per-class non-maximum suppression");
  nms_cmd->add_option("--pred", o.pred_path, "Prediction JSONL")->required()->check(CLI::ExistingFile);
  nms_cmd->add_option("--iou-thresh", o.nms_iou, "Suppress when IoU exceeds this (inference default 0.6)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  nms_cmd->add_option("--min-score", o.cfg.min_score, "Drop detections scored below this")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_out(nms_cmd);

  auto* fuse_cmd = app.add_subcommand("fuse", "Weighted box fusion of several models' predictions");
  fuse_cmd->add_option("predictions", o.fuse_paths, "Prediction JSONL, one file per model")
      ->required()
      ->check(CLI::ExistingFile);
  fuse_cmd->add_option("--iou-thresh", o.wbf_iou, "Cluster when IoU exceeds this (ensemble default 0.4)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  fuse_cmd->add_option("--weights", o.weights, "Per-model weights, comma separated (default all 1)")
      ->delimiter(',');
  fuse_cmd->add_option("--min-score", o.cfg.min_score, "Drop detections scored below this")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_out(fuse_cmd);

  auto* flip_cmd = app.add_subcommand("flip-merge", "Merge detections from the original and mirrored image");
  flip_cmd->add_option("--pred", o.pred_path, "Predictions on the original image")->required()->check(CLI::ExistingFile);
  flip_cmd->add_option("--flipped", o.flipped_path, "Predictions on the horizontally flipped image")
      ->required()
      ->check(CLI::ExistingFile);
  flip_cmd->add_option("--image-width", o.cfg.image_width, "Width of the image the boxes refer to (test resolution 1583x2048)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  flip_cmd->add_option("--iou-thresh", o.flip_iou, "NMS IoU threshold for the merge")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  flip_cmd->add_option("--min-score", o.cfg.min_score, "Drop detections scored below this")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_out(flip_cmd);

  auto* atss_cmd = app.add_subcommand("atss-sim", "Positive-sample counts under random sampling and ATSS");
  atss_cmd->add_option("--gt", o.gt_path, "Ground-truth CSV")->required()->check(CLI::ExistingFile);
  add_levels(atss_cmd);
  atss_cmd->add_option("--k", o.cfg.atss_k, "ATSS candidates per level")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  atss_cmd->add_option("--image-width", o.cfg.image_width, "Page width in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  atss_cmd->add_option("--image-height", o.cfg.image_height, "Page height in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_out(atss_cmd);

  auto* cov_cmd = app.add_subcommand("fpn-coverage", "Which pyramid levels can detect and regress each instance");
  cov_cmd->add_option("--gt", o.gt_path, "Ground-truth CSV")->required()->check(CLI::ExistingFile);
  add_levels(cov_cmd);
  cov_cmd->add_option("--regmax", o.cfg.regmax, "Regression bins per side (raised from 16 to 24 for slim isolated formulas)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_out(cov_cmd);

  auto* dec_cmd = app.add_subcommand("decode", "Decode side-offset distributions into boxes");
  dec_cmd->add_option("--input", o.decode_path, "Distribution JSONL")->required()->check(CLI::ExistingFile);
  add_levels(dec_cmd);
  dec_cmd->add_option("--regmax", o.cfg.regmax, "Regression bins per side")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  dec_cmd->add_option("--clip-width", o.clip_width, "Clip boxes to this image width (with --clip-height)");
  dec_cmd->add_option("--clip-height", o.clip_height, "Clip boxes to this image height");
  add_out(dec_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return 2;
  }

  try {
    if (o.simd != "auto") {
      simd::select_isa(o.simd == "avx2" ? simd::Isa::Avx2 : simd::Isa::Scalar);
    }
    o.cfg.levels = parse_levels(o.levels);
    o.cfg.validate();

    std::string result;
    if (*eval_cmd) {
      result = run_eval(o);
    } else if (*nms_cmd) {
      result = run_nms(o);
    } else if (*fuse_cmd) {
      result = run_fuse(o);
    } else if (*flip_cmd) {
      result = run_flip_merge(o);
    } else if (*atss_cmd) {
      result = run_atss_sim(o);
    } else if (*cov_cmd) {
      result = run_fpn_coverage(o);
    } else if (*dec_cmd) {
      result = run_decode(o);
    }
    emit(result, o.out_path, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mfd
