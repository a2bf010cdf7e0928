#pragma once

namespace mfd::simd {

// Same operand selection as the x86 MAXPD/MINPD instructions, so the scalar
// reference and the vector kernels agree on signed zeros.
inline double vmax(double a, double b) { return a > b ? a : b; }
inline double vmin(double a, double b) { return a < b ? a : b; }

// Reference IoU. The evaluation order here is mirrored lane-for-lane by the
// vector kernels.
inline double iou_reference(double ax1, double ay1, double ax2, double ay2,
                            double bx1, double by1, double bx2, double by2) {
  const double a_area = (ax2 - ax1) * (ay2 - ay1);
  const double iw = vmax(vmin(ax2, bx2) - vmax(ax1, bx1), 0.0);
  const double ih = vmax(vmin(ay2, by2) - vmax(ay1, by1), 0.0);
  const double inter = iw * ih;
  const double b_area = (bx2 - bx1) * (by2 - by1);
  const double uni = (a_area + b_area) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace mfd::simd
