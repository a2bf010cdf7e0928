#pragma once

#include <string_view>
#include <vector>

#include "mfd/pyramid.hpp"

namespace mfd {

// Defaults of the deployed formula detector: P2-P6 pyramid, 24 regression
// bins, ATSS top-9, NMS at 0.6, WBF at 0.4 and a 1583 x 2048 test resolution.
struct RunConfig {
  std::vector<int> levels{2, 3, 4, 5, 6};
  int regmax = 24;
  int atss_k = 9;
  double nms_iou = 0.6;
  double wbf_iou = 0.4;
  double eval_iou = 0.5;
  double min_score = 0.0;
  double image_width = 1583.0;
  double image_height = 2048.0;

  PyramidSpec pyramid() const { return PyramidSpec(levels, regmax); }
  // Throws std::invalid_argument on out-of-range thresholds, sizes or levels.
  void validate() const;
};

// "2-6" (inclusive range) or "2,3,5". Throws std::invalid_argument.
std::vector<int> parse_levels(std::string_view text);

}  // namespace mfd
