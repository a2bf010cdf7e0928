#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mfd/detection.hpp"

namespace mfd {

inline constexpr double kDefaultNmsIou = 0.6;
inline constexpr double kDefaultWbfIou = 0.4;

// Greedy non-maximum suppression, per class. Detections are visited in
// descending score order (equal scores: lower input index first); each kept
// detection suppresses later same-class detections with IoU > iou_thresh.
// The result is in visiting order. Throws std::invalid_argument unless
// iou_thresh is in [0, 1].
std::vector<Detection> nms(std::span<const Detection> dets, double iou_thresh);

// Test-time horizontal flip merge: maps the boxes detected on the mirrored
// image back, appends them after dets, and runs nms on the union.
std::vector<Detection> merge_flip(std::span<const Detection> dets,
                                  std::span<const Detection> dets_flipped,
                                  double image_width,
                                  double iou_thresh = kDefaultNmsIou);

struct FusedDetection {
  Detection det;
  std::size_t cluster_size;
};

// Weighted box fusion across M detection sets (one per model).
//
// All detections are pooled with score s * w_model and visited in descending
// pooled score. A detection joins the first same-class cluster whose current
// fused box overlaps it with IoU > iou_thresh, otherwise it opens a new
// cluster. A cluster's box is the score-weighted mean of its members and its
// score is mean(member scores) * min(n, M) / M.
//
// Weights default to 1 and are rescaled so the largest is 1, which keeps
// pooled and fused scores in [0, 1]. Throws std::invalid_argument on an empty det_sets list, a weight
// vector of the wrong length, or non-positive weights.
std::vector<FusedDetection> wbf(std::span<const std::vector<Detection>> det_sets,
                                double iou_thresh = kDefaultWbfIou,
                                std::optional<std::vector<double>> model_weights =
                                    std::nullopt);

// Detections with score >= min_score, order preserved.
std::vector<Detection> score_filter(std::span<const Detection> dets,
                                    double min_score);

}  // namespace mfd
