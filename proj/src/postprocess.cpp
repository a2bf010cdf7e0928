#include "mfd/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mfd/simd/box_kernels.hpp"

namespace mfd {
namespace {

void check_threshold(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must be in [0, 1]");
  }
}

}  // namespace

std::vector<Detection> nms(std::span<const Detection> dets, double iou_thresh) {
  check_threshold(iou_thresh, "NMS IoU threshold");

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  // Visiting order split by class.
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (const std::size_t i : order) by_class[class_index(dets[i].label)].push_back(i);

  std::vector<std::uint8_t> keep(dets.size(), 0);
  const simd::KernelTable& k = simd::kernels();
  std::vector<double> ious;
  for (const auto& members : by_class) {
    simd::BoxBuffer boxes;
    boxes.reserve(members.size());
    for (const std::size_t i : members) boxes.push_back(dets[i].box);
    std::vector<std::uint8_t> suppressed(members.size(), 0);
    for (std::size_t a = 0; a < members.size(); ++a) {
      if (suppressed[a]) continue;
      keep[members[a]] = 1;
      const simd::BoxColumns rest = boxes.columns().subspan(a + 1);
      if (rest.size() == 0) continue;
      ious.resize(rest.size());
      k.iou_one_to_many(dets[members[a]].box, rest, ious);
      for (std::size_t r = 0; r < rest.size(); ++r) {
        if (ious[r] > iou_thresh) suppressed[a + 1 + r] = 1;
      }
    }
  }

  std::vector<Detection> out;
  for (const std::size_t i : order) {
    if (keep[i]) out.push_back(dets[i]);
  }
  return out;
}

std::vector<Detection> merge_flip(std::span<const Detection> dets,
                                  std::span<const Detection> dets_flipped,
                                  double image_width, double iou_thresh) {
  if (!(image_width > 0.0)) {
    throw std::invalid_argument("image width must be positive");
  }
  std::vector<Detection> all(dets.begin(), dets.end());
  all.reserve(dets.size() + dets_flipped.size());
  for (const Detection& d : dets_flipped) {
    Detection mapped = d;
    mapped.box = hflip(d.box, image_width);
    all.push_back(mapped);
  }
  return nms(all, iou_thresh);
}

std::vector<FusedDetection> wbf(std::span<const std::vector<Detection>> det_sets,
                                double iou_thresh,
                                std::optional<std::vector<double>> model_weights) {
  check_threshold(iou_thresh, "WBF IoU threshold");
  if (det_sets.empty()) {
    throw std::invalid_argument("WBF needs at least one detection set");
  }
  const std::size_t num_models = det_sets.size();
  std::vector<double> weights(num_models, 1.0);
  if (model_weights) {
    if (model_weights->size() != num_models) {
      throw std::invalid_argument("WBF weight count does not match the number of models");
    }
    weights = *model_weights;
    for (const double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("WBF weights must be positive");
      }
    }
    const double top = *std::max_element(weights.begin(), weights.end());
    for (double& w : weights) w /= top;
  }

  struct Pooled {
    const Detection* det;
    std::size_t model;
    double score;
  };
  std::vector<Pooled> pool;
  for (std::size_t m = 0; m < num_models; ++m) {
    for (const Detection& d : det_sets[m]) {
      pool.push_back({&d, m, weights[m] == 1.0 ? d.score : d.score * weights[m]});
    }
  }
  // Model-major pooling order makes the stable sort break ties by model, then
  // by position within the model's list.
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Pooled& a, const Pooled& b) { return a.score > b.score; });

  struct Cluster {
    ClassLabel label;
    int model_id;
    std::size_t size = 0;
    double score_sum = 0.0;
    double score_lo = 1.0, score_hi = 0.0;
    std::array<double, 4> weighted{};  // sum of score * coordinate
    std::array<double, 4> plain{};     // sum of coordinates
    std::array<double, 4> lo{}, hi{};
    Box fused;
  };
  std::vector<Cluster> clusters;
  std::array<simd::BoxBuffer, kNumClasses> fused_boxes;
  std::array<std::vector<std::size_t>, kNumClasses> cluster_of;

  const auto fused_box = [](const Cluster& c) {
    std::array<double, 4> v{};
    for (std::size_t j = 0; j < 4; ++j) {
      const double mean = c.score_sum > 0.0
                              ? c.weighted[j] / c.score_sum
                              : c.plain[j] / static_cast<double>(c.size);
      // The weighted mean lies in [lo, hi]; clamping removes rounding drift.
      v[j] = std::clamp(mean, c.lo[j], c.hi[j]);
    }
    return Box(v[0], v[1], std::max(v[0], v[2]), std::max(v[1], v[3]));
  };

  const simd::KernelTable& k = simd::kernels();
  std::vector<double> ious;
  for (const Pooled& p : pool) {
    const std::size_t ci = class_index(p.det->label);
    const Box& b = p.det->box;
    std::optional<std::size_t> match;
    if (fused_boxes[ci].size() > 0) {
      ious.resize(fused_boxes[ci].size());
      k.iou_one_to_many(b, fused_boxes[ci].columns(), ious);
      for (std::size_t i = 0; i < ious.size(); ++i) {
        if (ious[i] > iou_thresh) {
          match = i;
          break;
        }
      }
    }
    const std::array<double, 4> coords{b.x1(), b.y1(), b.x2(), b.y2()};
    if (!match) {
      Cluster c{p.det->label, static_cast<int>(p.model), 0, 0.0, 1.0, 0.0, {}, {}, coords, coords, b};
      clusters.push_back(c);
      cluster_of[ci].push_back(clusters.size() - 1);
      fused_boxes[ci].push_back(b);
      match = fused_boxes[ci].size() - 1;
    }
    Cluster& c = clusters[cluster_of[ci][*match]];
    ++c.size;
    c.score_sum += p.score;
    c.score_lo = std::min(c.score_lo, p.score);
    c.score_hi = std::max(c.score_hi, p.score);
    for (std::size_t j = 0; j < 4; ++j) {
      c.weighted[j] += p.score * coords[j];
      c.plain[j] += coords[j];
      c.lo[j] = std::min(c.lo[j], coords[j]);
      c.hi[j] = std::max(c.hi[j], coords[j]);
    }
    c.fused = fused_box(c);
    fused_boxes[ci].set(*match, c.fused);
  }

  std::vector<FusedDetection> out;
  out.reserve(clusters.size());
  for (const Cluster& c : clusters) {
    const double n = static_cast<double>(c.size);
    const double m = static_cast<double>(num_models);
    // Same clamp as the coordinates: n equal scores average to exactly that score.
    const double mean = std::clamp(c.score_sum / n, c.score_lo, c.score_hi);
    const double score = mean * (std::min(n, m) / m);
    out.push_back({Detection(c.fused, c.label, std::clamp(score, 0.0, 1.0), c.model_id),
                   c.size});
  }
  std::stable_sort(out.begin(), out.end(), [](const FusedDetection& a, const FusedDetection& b) {
    return a.det.score > b.det.score;
  });
  return out;
}

std::vector<Detection> score_filter(std::span<const Detection> dets,
                                    double min_score) {
  check_threshold(min_score, "minimum score");
  std::vector<Detection> out;
  std::copy_if(dets.begin(), dets.end(), std::back_inserter(out),
               [&](const Detection& d) { return d.score >= min_score; });
  return out;
}

}  // namespace mfd
