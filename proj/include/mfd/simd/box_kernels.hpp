#pragma once

// Data-parallel box kernels used by the assignment, post-processing and
// evaluation loops. Every kernel has a scalar reference implementation; wider
// variants are selected once at startup from the CPU's capabilities and must
// produce bit-identical results to the reference.
//
// The environment variable MFD_SIMD=scalar|avx2 overrides the selection.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mfd/geometry.hpp"

namespace mfd::simd {

enum class Isa : std::uint8_t { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

// Structure-of-arrays view over a batch of boxes. All columns have equal length.
struct BoxColumns {
  std::span<const double> x1, y1, x2, y2;
  std::size_t size() const { return x1.size(); }
  BoxColumns subspan(std::size_t offset) const {
    return {x1.subspan(offset), y1.subspan(offset), x2.subspan(offset),
            y2.subspan(offset)};
  }
};

struct PointColumns {
  std::span<const double> x, y;
  std::size_t size() const { return x.size(); }
};

// Owning SoA storage for boxes.
class BoxBuffer {
 public:
  BoxBuffer() = default;
  explicit BoxBuffer(std::span<const Box> boxes);

  void reserve(std::size_t n);
  void push_back(const Box& b);
  void set(std::size_t i, const Box& b);
  Box at(std::size_t i) const;
  std::size_t size() const { return x1_.size(); }
  BoxColumns columns() const { return {x1_, y1_, x2_, y2_}; }

 private:
  std::vector<double> x1_, y1_, x2_, y2_;
};

struct KernelTable {
  Isa isa;
  // out[i] = iou(query, boxes[i]).
  void (*iou_one_to_many)(const Box& query, BoxColumns boxes,
                          std::span<double> out);
  // out[i] = 1 if point i lies strictly inside box, else 0.
  void (*inside_mask)(const Box& box, PointColumns points,
                      std::span<std::uint8_t> out);
  // out[i] = (x[i] - cx)^2 + (y[i] - cy)^2.
  void (*squared_distance)(double cx, double cy, PointColumns points,
                           std::span<double> out);
};

bool isa_available(Isa isa);

// The table chosen for this process.
const KernelTable& kernels();

// A specific variant; throws std::runtime_error when it is not available on
// this build or CPU.
const KernelTable& kernels_for(Isa isa);

// Replace the process-wide selection. Intended for tests and benchmarks.
void select_isa(Isa isa);

namespace scalar {
void iou_one_to_many(const Box& query, BoxColumns boxes, std::span<double> out);
void inside_mask(const Box& box, PointColumns points,
                 std::span<std::uint8_t> out);
void squared_distance(double cx, double cy, PointColumns points,
                      std::span<double> out);
}  // namespace scalar

#if defined(MFD_HAVE_AVX2)
namespace avx2 {
void iou_one_to_many(const Box& query, BoxColumns boxes, std::span<double> out);
void inside_mask(const Box& box, PointColumns points,
                 std::span<std::uint8_t> out);
void squared_distance(double cx, double cy, PointColumns points,
                      std::span<double> out);
}  // namespace avx2
#endif

}  // namespace mfd::simd
