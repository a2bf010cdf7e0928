#include "mfd/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mfd {

double level_stride(int level) { return std::ldexp(1.0, level); }

PyramidSpec::PyramidSpec(std::vector<int> levels, int regmax)
    : levels_(std::move(levels)), regmax_(regmax) {
  if (levels_.empty()) {
    throw std::invalid_argument("pyramid needs at least one level");
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const int l = levels_[i];
    if (l < kMinPyramidLevel || l > kMaxPyramidLevel) {
      throw std::invalid_argument("pyramid level " + std::to_string(l) +
                                  " outside [1, 8]");
    }
    if (i > 0 && l <= levels_[i - 1]) {
      throw std::invalid_argument("pyramid levels must be strictly increasing");
    }
  }
  if (regmax_ < 1) {
    throw std::invalid_argument("regmax must be >= 1");
  }
}

PyramidSpec PyramidSpec::range(int lo, int hi, int regmax) {
  if (hi < lo) {
    throw std::invalid_argument("pyramid range upper bound below lower bound");
  }
  std::vector<int> levels;
  for (int l = lo; l <= hi; ++l) levels.push_back(l);
  return PyramidSpec(std::move(levels), regmax);
}

bool PyramidSpec::contains(int level) const {
  return std::binary_search(levels_.begin(), levels_.end(), level);
}

std::size_t PyramidSpec::level_position(int level) const {
  const auto it = std::lower_bound(levels_.begin(), levels_.end(), level);
  if (it == levels_.end() || *it != level) {
    throw std::out_of_range("level " + std::to_string(level) +
                            " is not part of pyramid " + describe());
  }
  return static_cast<std::size_t>(it - levels_.begin());
}

PyramidSpec PyramidSpec::shifted(int delta) const {
  std::vector<int> levels = levels_;
  for (int& l : levels) l += delta;
  return PyramidSpec(std::move(levels), regmax_);
}

std::string PyramidSpec::describe() const {
  std::ostringstream out;
  const bool contiguous =
      levels_.back() - levels_.front() + 1 == static_cast<int>(levels_.size());
  if (contiguous && levels_.size() > 1) {
    out << levels_.front() << '-' << levels_.back();
  } else {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      out << (i ? "," : "") << levels_[i];
    }
  }
  return out.str();
}

std::size_t grid_columns(int level, double extent) {
  if (!(extent > 0.0)) return 0;
  const double stride = level_stride(level);
  // Largest n with stride * (n - 0.5) < extent.
  auto n = static_cast<std::size_t>(std::ceil(extent / stride - 0.5));
  while (n > 0 && !(stride * (static_cast<double>(n - 1) + 0.5) < extent)) --n;
  while (stride * (static_cast<double>(n) + 0.5) < extent) ++n;
  return n;
}

std::vector<GridPoint> grid_points(int level, double image_w, double image_h) {
  const double stride = level_stride(level);
  const std::size_t cols = grid_columns(level, image_w);
  const std::size_t rows = grid_columns(level, image_h);
  std::vector<GridPoint> points;
  points.reserve(cols * rows);
  for (std::size_t j = 0; j < rows; ++j) {
    const double y = stride * (static_cast<double>(j) + 0.5);
    for (std::size_t i = 0; i < cols; ++i) {
      points.push_back({stride * (static_cast<double>(i) + 0.5), y, level});
    }
  }
  return points;
}

double min_detectable_short_side(const PyramidSpec& spec) {
  return kMinDetectableCells * level_stride(spec.lowest_level());
}

double max_regressable_side(int level, int regmax) {
  if (regmax < 1) throw std::invalid_argument("regmax must be >= 1");
  return 2.0 * regmax * level_stride(level);
}

CoverageReport coverage_report(std::span<const GroundTruthInstance> gts,
                               const PyramidSpec& spec) {
  CoverageReport report;
  report.entries.reserve(gts.size());
  for (const GroundTruthInstance& gt : gts) {
    CoverageEntry e{gt.page_id, gt.label, gt.box.short_side(),
                    gt.box.long_side(), {}, {}, {}};
    for (const int level : spec.levels()) {
      const bool detectable =
          e.short_side >= kMinDetectableCells * level_stride(level);
      const bool regressable =
          e.long_side <= max_regressable_side(level, spec.regmax());
      if (detectable) e.detectable_levels.push_back(level);
      if (regressable) e.regressable_levels.push_back(level);
      if (detectable && regressable) e.levels.push_back(level);
    }
    CoverageCounts& c = report.per_class[class_index(gt.label)];
    ++c.instances;
    ++report.total.instances;
    if (!e.covered()) {
      ++c.flagged;
      ++report.total.flagged;
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace mfd
