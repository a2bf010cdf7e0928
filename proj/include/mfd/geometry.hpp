#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace mfd {

// Axis-aligned box in continuous pixel coordinates. (x1, y1) is the top-left
// corner and (x2, y2) the bottom-right; the bottom-right corner is exclusive,
// so area is (x2 - x1) * (y2 - y1) without any "+1" term.
class Box {
 public:
  constexpr Box() = default;
  // Throws std::invalid_argument on non-finite coordinates or negative extent.
  Box(double x1, double y1, double x2, double y2);

  double x1() const { return x1_; }
  double y1() const { return y1_; }
  double x2() const { return x2_; }
  double y2() const { return y2_; }

  double width() const { return x2_ - x1_; }
  double height() const { return y2_ - y1_; }
  double short_side() const;
  double long_side() const;
  double center_x() const { return 0.5 * (x1_ + x2_); }
  double center_y() const { return 0.5 * (y1_ + y2_); }

  // Strict containment; points on an edge are outside.
  bool strictly_contains(double x, double y) const {
    return x1_ < x && x < x2_ && y1_ < y && y < y2_;
  }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  double x1_ = 0.0;
  double y1_ = 0.0;
  double x2_ = 0.0;
  double y2_ = 0.0;
};

enum class ClassLabel : std::uint8_t { Embedded = 0, Isolated = 1 };

inline constexpr std::size_t kNumClasses = 2;
inline constexpr std::array<ClassLabel, kNumClasses> kAllClasses = {
    ClassLabel::Embedded, ClassLabel::Isolated};

constexpr std::size_t class_index(ClassLabel c) {
  return static_cast<std::size_t>(c);
}

// Case-insensitive; nullopt for anything other than embedded/isolated.
std::optional<ClassLabel> parse_class_label(std::string_view text);
// Lowercase name.
std::string_view to_string(ClassLabel c);

double area(const Box& b);

// Intersection over union; 0 when the union is empty.
double iou(const Box& a, const Box& b);

// Mirror about the vertical axis of an image of the given width.
// Throws std::invalid_argument unless 0 <= x1 and x2 <= image_width.
Box hflip(const Box& b, double image_width);

}  // namespace mfd
