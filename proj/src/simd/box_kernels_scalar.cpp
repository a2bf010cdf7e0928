#include "mfd/simd/box_kernels.hpp"

#include "simd/scalar_ops.hpp"

namespace mfd::simd::scalar {

void iou_one_to_many(const Box& query, BoxColumns boxes,
                     std::span<double> out) {
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    out[i] = iou_reference(query.x1(), query.y1(), query.x2(), query.y2(),
                           boxes.x1[i], boxes.y1[i], boxes.x2[i], boxes.y2[i]);
  }
}

void inside_mask(const Box& box, PointColumns points,
                 std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i] = box.strictly_contains(points.x[i], points.y[i]) ? 1 : 0;
  }
}

void squared_distance(double cx, double cy, PointColumns points,
                      std::span<double> out) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dx = points.x[i] - cx;
    const double dy = points.y[i] - cy;
    out[i] = dx * dx + dy * dy;
  }
}

}  // namespace mfd::simd::scalar
