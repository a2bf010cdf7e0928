#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mfd/detection.hpp"
#include "mfd/geometry.hpp"

namespace mfd {

inline constexpr int kMinPyramidLevel = 1;
inline constexpr int kMaxPyramidLevel = 8;

// Stride of pyramid level l, 2^l pixels.
double level_stride(int level);

// Feature-pyramid levels plus the GFL regression bin count shared by all of them.
class PyramidSpec {
 public:
  // Throws std::invalid_argument unless levels are non-empty, strictly
  // increasing, each within [kMinPyramidLevel, kMaxPyramidLevel], and regmax >= 1.
  PyramidSpec(std::vector<int> levels, int regmax);

  // Levels lo..hi inclusive, e.g. (2, 6) for P2-P6.
  static PyramidSpec range(int lo, int hi, int regmax);

  std::span<const int> levels() const { return levels_; }
  int regmax() const { return regmax_; }
  int lowest_level() const { return levels_.front(); }
  int highest_level() const { return levels_.back(); }
  bool contains(int level) const;
  // Position of level in levels(); throws std::out_of_range if absent.
  std::size_t level_position(int level) const;

  // Same spec with every level shifted by delta.
  PyramidSpec shifted(int delta) const;

  // "2-6" for contiguous ranges, "2,4,5" otherwise.
  std::string describe() const;

  friend bool operator==(const PyramidSpec&, const PyramidSpec&) = default;

 private:
  std::vector<int> levels_;
  int regmax_;
};

struct GridPoint {
  double x;
  double y;
  int level;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

// Cell centres (stride*(i+0.5), stride*(j+0.5)) that lie strictly inside a
// width x height image, in row-major order (y outer, x inner).
std::vector<GridPoint> grid_points(int level, double image_w, double image_h);

// Number of cell centres per axis; the lattice of grid_points is cols x rows.
std::size_t grid_columns(int level, double extent);

// A level resolves objects whose short side spans at least this many cells.
inline constexpr double kMinDetectableCells = 3.0;

// Smallest short side (px) any level of the spec can detect: 3 cells of the
// finest level.
double min_detectable_short_side(const PyramidSpec& spec);

// Largest box side (px) a level can regress when both opposing side offsets
// saturate at regmax bins: 2 * regmax * stride.
double max_regressable_side(int level, int regmax);

struct CoverageEntry {
  std::string page_id;
  ClassLabel label;
  double short_side;
  double long_side;
  std::vector<int> detectable_levels;   // short side >= 3 * stride
  std::vector<int> regressable_levels;  // long side <= 2 * regmax * stride
  std::vector<int> levels;              // both conditions
  bool covered() const { return !levels.empty(); }
};

struct CoverageCounts {
  std::size_t instances = 0;
  std::size_t flagged = 0;  // no level both detects and regresses the instance
};

struct CoverageReport {
  std::vector<CoverageEntry> entries;
  std::array<CoverageCounts, kNumClasses> per_class{};
  CoverageCounts total;
};

CoverageReport coverage_report(std::span<const GroundTruthInstance> gts,
                               const PyramidSpec& spec);

}  // namespace mfd
