#include "mfd/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "simd/scalar_ops.hpp"

namespace mfd {

Box::Box(double x1, double y1, double x2, double y2)
    : x1_(x1), y1_(y1), x2_(x2), y2_(y2) {
  if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) ||
      !std::isfinite(y2)) {
    throw std::invalid_argument("box coordinates must be finite");
  }
  if (x2 < x1 || y2 < y1) {
    std::ostringstream msg;
    msg << "box has negative extent: (" << x1 << ", " << y1 << ", " << x2
        << ", " << y2 << ")";
    throw std::invalid_argument(msg.str());
  }
}

double Box::short_side() const { return std::min(width(), height()); }
double Box::long_side() const { return std::max(width(), height()); }

std::optional<ClassLabel> parse_class_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "embedded") return ClassLabel::Embedded;
  if (lower == "isolated") return ClassLabel::Isolated;
  return std::nullopt;
}

std::string_view to_string(ClassLabel c) {
  return c == ClassLabel::Embedded ? "embedded" : "isolated";
}

double area(const Box& b) { return b.width() * b.height(); }

double iou(const Box& a, const Box& b) {
  return simd::iou_reference(a.x1(), a.y1(), a.x2(), a.y2(), b.x1(), b.y1(),
                             b.x2(), b.y2());
}

Box hflip(const Box& b, double image_width) {
  if (!(b.x1() >= 0.0) || b.x2() > image_width) {
    std::ostringstream msg;
    msg << "box x-range [" << b.x1() << ", " << b.x2()
        << "] is outside an image of width " << image_width;
    throw std::invalid_argument(msg.str());
  }
  return Box(image_width - b.x2(), b.y1(), image_width - b.x1(), b.y2());
}

}  // namespace mfd
