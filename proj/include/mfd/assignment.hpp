#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "mfd/geometry.hpp"
#include "mfd/pyramid.hpp"

namespace mfd {

// Positive-sample assignment for one ground-truth instance.
struct InstanceAssignment {
  std::vector<GridPoint> candidates;
  std::vector<GridPoint> positives;  // subset of candidates, conflicts resolved
  // IoU threshold applied to the candidates (ATSS only; 0 for random sampling).
  double iou_threshold = 0.0;

  std::size_t candidate_count() const { return candidates.size(); }
  std::size_t positive_count() const { return positives.size(); }
};

struct AssignmentResult {
  std::vector<InstanceAssignment> instances;  // parallel to the input boxes
};

inline constexpr int kDefaultAtssTopK = 9;
// Side of the square pseudo-anchor laid on a candidate, in strides.
inline constexpr double kAtssAnchorScale = 8.0;

// Area-proportional baseline: every grid point strictly inside a box is a
// positive for it. A point inside several boxes goes to the smallest one
// (first in input order on equal area).
AssignmentResult random_assign(std::span<const Box> gts, const PyramidSpec& spec,
                               double image_w, double image_h);

// Adaptive training sample selection.
//
// Per instance: take the k grid points nearest to the box centre on every
// level, lay an 8*stride square anchor on each, and keep the candidates whose
// anchor IoU reaches mean + population std of the candidate IoUs and whose
// point lies strictly inside the box. A point claimed by several instances
// stays with the highest anchor IoU, then the smaller box, then input order.
//
// Throws std::invalid_argument if k < 1.
AssignmentResult atss_assign(std::span<const Box> gts, const PyramidSpec& spec,
                             double image_w, double image_h,
                             int k = kDefaultAtssTopK);

// Mean + population standard deviation of the candidate IoUs. A set of
// identical values yields that value exactly.
double atss_iou_threshold(std::span<const double> ious);

struct ImbalanceStats {
  std::vector<double> areas;
  std::vector<std::size_t> positive_counts;
  // Pearson correlation of log10(area) with positive count; 0 when either
  // variable has zero variance.
  double log_area_count_correlation = 0.0;
  // histogram[c] = number of instances with exactly c positives.
  std::vector<std::size_t> histogram;
};

// Throws std::invalid_argument if the result does not belong to gts.
ImbalanceStats imbalance_stats(const AssignmentResult& result,
                               std::span<const Box> gts);

// Pearson correlation; 0 when either input has zero variance or fewer than two
// samples. Throws std::invalid_argument on length mismatch.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace mfd
