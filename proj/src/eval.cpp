#include "mfd/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "mfd/simd/box_kernels.hpp"

namespace mfd {

PageMatching match_page_detailed(std::span<const Detection> preds,
                                 std::span<const GroundTruthInstance> gts,
                                 double iou_thresh) {
  if (!(iou_thresh >= 0.0 && iou_thresh <= 1.0)) {
    throw std::invalid_argument("evaluation IoU threshold must be in [0, 1]");
  }
  PageMatching m;
  m.pred_to_gt.assign(preds.size(), -1);

  const simd::KernelTable& k = simd::kernels();
  std::vector<double> ious;
  for (const ClassLabel label : kAllClasses) {
    std::vector<std::size_t> gt_idx;
    simd::BoxBuffer gt_boxes;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gts[g].label == label) {
        gt_idx.push_back(g);
        gt_boxes.push_back(gts[g].box);
      }
    }
    std::vector<std::size_t> pred_idx;
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (preds[p].label == label) pred_idx.push_back(p);
    }
    std::stable_sort(pred_idx.begin(), pred_idx.end(), [&](std::size_t a, std::size_t b) {
      return preds[a].score > preds[b].score;
    });

    std::vector<std::uint8_t> taken(gt_idx.size(), 0);
    MatchCounts& c = m.counts[class_index(label)];
    ious.resize(gt_idx.size());
    for (const std::size_t p : pred_idx) {
      if (!gt_idx.empty()) k.iou_one_to_many(preds[p].box, gt_boxes.columns(), ious);
      long best = -1;
      double best_iou = -1.0;
      for (std::size_t g = 0; g < gt_idx.size(); ++g) {
        if (!taken[g] && ious[g] >= iou_thresh && ious[g] > best_iou) {
          best = static_cast<long>(g);
          best_iou = ious[g];
        }
      }
      if (best >= 0) {
        taken[static_cast<std::size_t>(best)] = 1;
        m.pred_to_gt[p] = static_cast<long>(gt_idx[static_cast<std::size_t>(best)]);
        ++c.tp;
      } else {
        ++c.fp;
      }
    }
    c.fn = gt_idx.size() - c.tp;
  }
  return m;
}

ClassCounts match_page(std::span<const Detection> preds,
                       std::span<const GroundTruthInstance> gts,
                       double iou_thresh) {
  return match_page_detailed(preds, gts, iou_thresh).counts;
}

Scores scores_from(const MatchCounts& c) {
  Scores s;
  const auto tp = static_cast<double>(c.tp);
  s.precision = c.tp + c.fp == 0 ? 1.0 : tp / static_cast<double>(c.tp + c.fp);
  s.recall = c.tp + c.fn == 0 ? 1.0 : tp / static_cast<double>(c.tp + c.fn);
  const double pr = s.precision + s.recall;
  s.f1 = pr == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / pr;
  return s;
}

EvalReport evaluate(std::span<const PredictionRecord> preds,
                    std::span<const GroundTruthInstance> gts, double iou_thresh) {
  std::map<std::string, std::vector<GroundTruthInstance>> gt_pages;
  for (const GroundTruthInstance& g : gts) gt_pages[g.page_id].push_back(g);

  std::unordered_map<std::string, std::vector<Detection>> pred_pages;
  for (const PredictionRecord& r : preds) {
    if (!gt_pages.contains(r.page_id)) {
      throw std::invalid_argument("prediction for unknown page '" + r.page_id + "'");
    }
    pred_pages[r.page_id].push_back(r.det);
  }

  EvalReport report;
  for (const auto& [page, page_gts] : gt_pages) {
    const auto it = pred_pages.find(page);
    const std::span<const Detection> page_preds =
        it == pred_pages.end() ? std::span<const Detection>{} : std::span(it->second);
    const ClassCounts counts = match_page(page_preds, page_gts, iou_thresh);
    report.per_page.emplace(page, counts);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      report.per_class[c].counts += counts[c];
      report.total.counts += counts[c];
    }
  }
  for (ClassMetrics& m : report.per_class) m.scores = scores_from(m.counts);
  report.total.scores = scores_from(report.total.counts);
  return report;
}

std::string format_report(const EvalReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %7s  %-17s %8s %8s %8s\n", "class", "F1",
                "precision/recall", "TP", "FP", "FN");
  out += line;
  const auto row = [&](const char* name, const ClassMetrics& m) {
    char pr[48];
    std::snprintf(pr, sizeof pr, "p:%.2f r:%.2f", 100.0 * m.scores.precision,
                  100.0 * m.scores.recall);
    std::snprintf(line, sizeof line, "%-10s %7.2f  %-17s %8zu %8zu %8zu\n", name,
                  100.0 * m.scores.f1, pr, m.counts.tp, m.counts.fp, m.counts.fn);
    out += line;
  };
  for (const ClassLabel c : kAllClasses) {
    row(std::string(to_string(c)).c_str(), report.for_class(c));
  }
  row("total", report.total);
  return out;
}

namespace {

nlohmann::ordered_json metrics_json(const ClassMetrics& m) {
  nlohmann::ordered_json j;
  j["f1"] = m.scores.f1;
  j["precision"] = m.scores.precision;
  j["recall"] = m.scores.recall;
  j["tp"] = m.counts.tp;
  j["fp"] = m.counts.fp;
  j["fn"] = m.counts.fn;
  return j;
}

}  // namespace

std::string report_to_json(const EvalReport& report, bool include_pages) {
  nlohmann::ordered_json j;
  for (const ClassLabel c : kAllClasses) {
    j[std::string(to_string(c))] = metrics_json(report.for_class(c));
  }
  j["total"] = metrics_json(report.total);
  if (include_pages) {
    nlohmann::ordered_json pages = nlohmann::ordered_json::object();
    for (const auto& [page, counts] : report.per_page) {
      nlohmann::ordered_json p;
      for (const ClassLabel c : kAllClasses) {
        const MatchCounts& mc = counts[class_index(c)];
        p[std::string(to_string(c))] = {{"tp", mc.tp}, {"fp", mc.fp}, {"fn", mc.fn}};
      }
      pages[page] = p;
    }
    j["pages"] = pages;
  }
  return j.dump(2) + "\n";
}

}  // namespace mfd
