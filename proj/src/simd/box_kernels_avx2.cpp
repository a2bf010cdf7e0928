#include <immintrin.h>

#include "mfd/simd/box_kernels.hpp"

#if !defined(__AVX2__)
#error "box_kernels_avx2.cpp must be compiled with -mavx2"
#endif

namespace mfd::simd::avx2 {

void iou_one_to_many(const Box& query, BoxColumns boxes,
                     std::span<double> out) {
  const std::size_t n = boxes.size();
  const __m256d qx1 = _mm256_set1_pd(query.x1());
  const __m256d qy1 = _mm256_set1_pd(query.y1());
  const __m256d qx2 = _mm256_set1_pd(query.x2());
  const __m256d qy2 = _mm256_set1_pd(query.y2());
  const __m256d q_area =
      _mm256_mul_pd(_mm256_sub_pd(qx2, qx1), _mm256_sub_pd(qy2, qy1));
  const __m256d zero = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d bx1 = _mm256_loadu_pd(boxes.x1.data() + i);
    const __m256d by1 = _mm256_loadu_pd(boxes.y1.data() + i);
    const __m256d bx2 = _mm256_loadu_pd(boxes.x2.data() + i);
    const __m256d by2 = _mm256_loadu_pd(boxes.y2.data() + i);

    const __m256d iw = _mm256_max_pd(
        _mm256_sub_pd(_mm256_min_pd(qx2, bx2), _mm256_max_pd(qx1, bx1)), zero);
    const __m256d ih = _mm256_max_pd(
        _mm256_sub_pd(_mm256_min_pd(qy2, by2), _mm256_max_pd(qy1, by1)), zero);
    const __m256d inter = _mm256_mul_pd(iw, ih);
    const __m256d b_area =
        _mm256_mul_pd(_mm256_sub_pd(bx2, bx1), _mm256_sub_pd(by2, by1));
    const __m256d uni = _mm256_sub_pd(_mm256_add_pd(q_area, b_area), inter);
    const __m256d positive = _mm256_cmp_pd(uni, zero, _CMP_GT_OQ);
    const __m256d ratio = _mm256_div_pd(inter, uni);
    _mm256_storeu_pd(out.data() + i, _mm256_and_pd(ratio, positive));
  }
  if (i < n) {
    scalar::iou_one_to_many(query, boxes.subspan(i), out.subspan(i));
  }
}

void inside_mask(const Box& box, PointColumns points,
                 std::span<std::uint8_t> out) {
  const std::size_t n = points.size();
  const __m256d x1 = _mm256_set1_pd(box.x1());
  const __m256d y1 = _mm256_set1_pd(box.y1());
  const __m256d x2 = _mm256_set1_pd(box.x2());
  const __m256d y2 = _mm256_set1_pd(box.y2());

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d px = _mm256_loadu_pd(points.x.data() + i);
    const __m256d py = _mm256_loadu_pd(points.y.data() + i);
    const __m256d in_x = _mm256_and_pd(_mm256_cmp_pd(px, x1, _CMP_GT_OQ),
                                       _mm256_cmp_pd(px, x2, _CMP_LT_OQ));
    const __m256d in_y = _mm256_and_pd(_mm256_cmp_pd(py, y1, _CMP_GT_OQ),
                                       _mm256_cmp_pd(py, y2, _CMP_LT_OQ));
    const int bits = _mm256_movemask_pd(_mm256_and_pd(in_x, in_y));
    out[i + 0] = static_cast<std::uint8_t>(bits & 1);
    out[i + 1] = static_cast<std::uint8_t>((bits >> 1) & 1);
    out[i + 2] = static_cast<std::uint8_t>((bits >> 2) & 1);
    out[i + 3] = static_cast<std::uint8_t>((bits >> 3) & 1);
  }
  if (i < n) {
    scalar::inside_mask(box, {points.x.subspan(i), points.y.subspan(i)},
                        out.subspan(i));
  }
}

void squared_distance(double cx, double cy, PointColumns points,
                      std::span<double> out) {
  const std::size_t n = points.size();
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(points.x.data() + i), vcx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(points.y.data() + i), vcy);
    _mm256_storeu_pd(out.data() + i,
                     _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
  }
  if (i < n) {
    scalar::squared_distance(cx, cy, {points.x.subspan(i), points.y.subspan(i)},
                             out.subspan(i));
  }
}

}  // namespace mfd::simd::avx2
