#include "mfd/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mfd/simd/box_kernels.hpp"

namespace mfd {
namespace {

// Flattened lattice of one pyramid level.
struct LevelGrid {
  int level = 0;
  double stride = 0.0;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::vector<double> xs;
  std::vector<double> ys;

  std::size_t size() const { return xs.size(); }
  simd::PointColumns columns() const { return {xs, ys}; }
  simd::PointColumns rows_slice(std::size_t row_begin, std::size_t row_end) const {
    const std::size_t b = row_begin * cols, n = (row_end - row_begin) * cols;
    return {std::span<const double>(xs).subspan(b, n),
            std::span<const double>(ys).subspan(b, n)};
  }
  GridPoint point(std::size_t i) const { return {xs[i], ys[i], level}; }
};

std::vector<LevelGrid> build_grids(const PyramidSpec& spec, double image_w,
                                   double image_h) {
  std::vector<LevelGrid> grids;
  grids.reserve(spec.levels().size());
  for (const int level : spec.levels()) {
    LevelGrid g;
    g.level = level;
    g.stride = level_stride(level);
    g.cols = grid_columns(level, image_w);
    g.rows = grid_columns(level, image_h);
    g.xs.reserve(g.cols * g.rows);
    g.ys.reserve(g.cols * g.rows);
    for (const GridPoint& p : grid_points(level, image_w, image_h)) {
      g.xs.push_back(p.x);
      g.ys.push_back(p.y);
    }
    grids.push_back(std::move(g));
  }
  return grids;
}

// Rows whose centre y may lie strictly inside (lo, hi).
std::pair<std::size_t, std::size_t> row_window(const LevelGrid& g, double lo,
                                               double hi) {
  // Centre of row j is stride * (j + 0.5).
  const double first = std::floor(lo / g.stride - 0.5);
  const double last = std::ceil(hi / g.stride - 0.5);
  const auto clamp_row = [&](double r) {
    if (r < 0.0) return std::size_t{0};
    return std::min(static_cast<std::size_t>(r), g.rows);
  };
  const std::size_t b = clamp_row(first);
  const std::size_t e = clamp_row(last + 1.0);
  return {b, std::max(b, e)};
}

struct PointRef {
  std::size_t level_pos;
  std::size_t index;
};

void check_image(double image_w, double image_h) {
  if (!(image_w > 0.0) || !(image_h > 0.0) || !std::isfinite(image_w) ||
      !std::isfinite(image_h)) {
    throw std::invalid_argument("image dimensions must be positive and finite");
  }
}

}  // namespace

AssignmentResult random_assign(std::span<const Box> gts, const PyramidSpec& spec,
                               double image_w, double image_h) {
  check_image(image_w, image_h);
  const std::vector<LevelGrid> grids = build_grids(spec, image_w, image_h);
  const simd::KernelTable& k = simd::kernels();

  // owner[level][point] = index of the smallest box containing the point.
  std::vector<std::vector<std::int64_t>> owner(grids.size());
  for (std::size_t l = 0; l < grids.size(); ++l) owner[l].assign(grids[l].size(), -1);

  AssignmentResult result;
  result.instances.resize(gts.size());
  std::vector<std::vector<PointRef>> refs(gts.size());
  std::vector<std::uint8_t> mask;

  for (std::size_t gi = 0; gi < gts.size(); ++gi) {
    const Box& gt = gts[gi];
    const double gt_area = area(gt);
    for (std::size_t l = 0; l < grids.size(); ++l) {
      const LevelGrid& grid = grids[l];
      const auto [rb, re] = row_window(grid, gt.y1(), gt.y2());
      if (rb == re) continue;
      const simd::PointColumns pts = grid.rows_slice(rb, re);
      mask.resize(pts.size());
      k.inside_mask(gt, pts, mask);
      const std::size_t base = rb * grid.cols;
      for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const std::size_t idx = base + i;
        result.instances[gi].candidates.push_back(grid.point(idx));
        refs[gi].push_back({l, idx});
        std::int64_t& o = owner[l][idx];
        if (o < 0 || gt_area < area(gts[static_cast<std::size_t>(o)])) {
          o = static_cast<std::int64_t>(gi);
        }
      }
    }
  }

  for (std::size_t gi = 0; gi < gts.size(); ++gi) {
    InstanceAssignment& inst = result.instances[gi];
    for (std::size_t c = 0; c < refs[gi].size(); ++c) {
      const PointRef& r = refs[gi][c];
      if (owner[r.level_pos][r.index] == static_cast<std::int64_t>(gi)) {
        inst.positives.push_back(inst.candidates[c]);
      }
    }
  }
  return result;
}

double atss_iou_threshold(std::span<const double> ious) {
  if (ious.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(ious.begin(), ious.end());
  if (*lo == *hi) return *lo;
  double sum = 0.0;
  for (const double v : ious) sum += v;
  const double n = static_cast<double>(ious.size());
  const double mean = sum / n;
  double sq = 0.0;
  for (const double v : ious) sq += (v - mean) * (v - mean);
  return mean + std::sqrt(sq / n);
}

AssignmentResult atss_assign(std::span<const Box> gts, const PyramidSpec& spec,
                             double image_w, double image_h, int k) {
  if (k < 1) throw std::invalid_argument("ATSS top-k must be >= 1");
  check_image(image_w, image_h);
  const std::vector<LevelGrid> grids = build_grids(spec, image_w, image_h);
  const simd::KernelTable& kern = simd::kernels();
  const auto top_k = static_cast<std::size_t>(k);

  struct Claim {
    std::size_t gt;
    double iou;
  };
  // Per level, the current winning claim on each point.
  std::vector<std::vector<std::int64_t>> winner(grids.size());
  std::vector<std::vector<double>> winner_iou(grids.size());
  for (std::size_t l = 0; l < grids.size(); ++l) {
    winner[l].assign(grids[l].size(), -1);
    winner_iou[l].assign(grids[l].size(), 0.0);
  }

  AssignmentResult result;
  result.instances.resize(gts.size());
  std::vector<std::vector<PointRef>> positive_refs(gts.size());
  std::vector<std::vector<double>> positive_ious(gts.size());

  std::vector<double> dist;
  std::vector<std::size_t> order;
  std::vector<double> ious;

  for (std::size_t gi = 0; gi < gts.size(); ++gi) {
    const Box& gt = gts[gi];
    InstanceAssignment& inst = result.instances[gi];
    std::vector<PointRef> cand_refs;
    simd::BoxBuffer anchors;

    for (std::size_t l = 0; l < grids.size(); ++l) {
      const LevelGrid& grid = grids[l];
      const std::size_t n = grid.size();
      if (n == 0) continue;
      dist.resize(n);
      kern.squared_distance(gt.center_x(), gt.center_y(), grid.columns(), dist);

      order.resize(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      const auto closer = [&](std::size_t a, std::size_t b) {
        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
      };
      const std::size_t take = std::min(top_k, n);
      if (take < n) {
        std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                         order.end(), closer);
      }
      std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), closer);

      const double half = 0.5 * kAtssAnchorScale * grid.stride;
      for (std::size_t c = 0; c < take; ++c) {
        const std::size_t idx = order[c];
        inst.candidates.push_back(grid.point(idx));
        cand_refs.push_back({l, idx});
        anchors.push_back(Box(grid.xs[idx] - half, grid.ys[idx] - half,
                              grid.xs[idx] + half, grid.ys[idx] + half));
      }
    }

    ious.resize(anchors.size());
    kern.iou_one_to_many(gt, anchors.columns(), ious);
    inst.iou_threshold = atss_iou_threshold(ious);

    for (std::size_t c = 0; c < inst.candidates.size(); ++c) {
      const GridPoint& p = inst.candidates[c];
      if (!(ious[c] >= inst.iou_threshold) || !gt.strictly_contains(p.x, p.y)) {
        continue;
      }
      positive_refs[gi].push_back(cand_refs[c]);
      positive_ious[gi].push_back(ious[c]);

      const PointRef& r = cand_refs[c];
      std::int64_t& w = winner[r.level_pos][r.index];
      double& w_iou = winner_iou[r.level_pos][r.index];
      bool take_over = w < 0;
      if (!take_over) {
        const double other_area = area(gts[static_cast<std::size_t>(w)]);
        take_over = ious[c] > w_iou || (ious[c] == w_iou && area(gt) < other_area);
      }
      if (take_over) {
        w = static_cast<std::int64_t>(gi);
        w_iou = ious[c];
      }
    }
  }

  for (std::size_t gi = 0; gi < gts.size(); ++gi) {
    for (const PointRef& r : positive_refs[gi]) {
      if (winner[r.level_pos][r.index] == static_cast<std::int64_t>(gi)) {
        result.instances[gi].positives.push_back(grids[r.level_pos].point(r.index));
      }
    }
  }
  return result;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("pearson_correlation: length mismatch");
  }
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

ImbalanceStats imbalance_stats(const AssignmentResult& result,
                               std::span<const Box> gts) {
  if (result.instances.size() != gts.size()) {
    throw std::invalid_argument("assignment result does not match the instance list");
  }
  ImbalanceStats stats;
  stats.areas.reserve(gts.size());
  stats.positive_counts.reserve(gts.size());
  std::vector<double> log_area, counts;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const double a = area(gts[i]);
    const std::size_t c = result.instances[i].positive_count();
    stats.areas.push_back(a);
    stats.positive_counts.push_back(c);
    // Zero-area boxes have no defined log-area; they contribute log10 of the
    // smallest positive double instead of -inf.
    log_area.push_back(std::log10(std::max(a, std::numeric_limits<double>::min())));
    counts.push_back(static_cast<double>(c));
    if (stats.histogram.size() <= c) stats.histogram.resize(c + 1, 0);
    ++stats.histogram[c];
  }
  stats.log_area_count_correlation = pearson_correlation(log_area, counts);
  return stats;
}

}  // namespace mfd
