#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mfd/detection.hpp"

namespace mfd {

inline constexpr double kDefaultEvalIou = 0.5;

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

using ClassCounts = std::array<MatchCounts, kNumClasses>;

struct PageMatching {
  // pred_to_gt[i] is the index into the page's GT list matched by prediction
  // i, or -1. Indices refer to the input order of both lists.
  std::vector<long> pred_to_gt;
  ClassCounts counts{};
};

// Greedy matching on one page. Per class, predictions are visited by
// descending score (input order on ties); each takes the unmatched same-class
// GT with the highest IoU if that IoU >= iou_thresh (first GT on IoU ties).
PageMatching match_page_detailed(std::span<const Detection> preds,
                                 std::span<const GroundTruthInstance> gts,
                                 double iou_thresh);

ClassCounts match_page(std::span<const Detection> preds,
                       std::span<const GroundTruthInstance> gts,
                       double iou_thresh);

struct Scores {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
};

// p = TP/(TP+FP), r = TP/(TP+FN), each 1 on an empty denominator;
// F1 = 2pr/(p+r), 0 when p + r = 0.
Scores scores_from(const MatchCounts& c);

struct ClassMetrics {
  MatchCounts counts;
  Scores scores;
};

struct EvalReport {
  std::array<ClassMetrics, kNumClasses> per_class{};
  ClassMetrics total;  // micro-average over classes
  std::map<std::string, ClassCounts> per_page;

  const ClassMetrics& for_class(ClassLabel c) const { return per_class[class_index(c)]; }
};

// Evaluates a prediction set against ground truth. Every GT page is scored,
// pages without predictions contributing false negatives only. Throws
// std::invalid_argument if a prediction refers to a page absent from gts.
EvalReport evaluate(std::span<const PredictionRecord> preds,
                    std::span<const GroundTruthInstance> gts,
                    double iou_thresh = kDefaultEvalIou);

// Fixed-width table, one row per class plus "total":
//   class      F1  precision/recall   TP  FP  FN
// with F1/p/r in percent, two decimals.
std::string format_report(const EvalReport& report);

// JSON object with per-class and total counts and scores.
std::string report_to_json(const EvalReport& report, bool include_pages = false);

}  // namespace mfd
