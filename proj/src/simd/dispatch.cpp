#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "mfd/simd/box_kernels.hpp"

namespace mfd::simd {
namespace {

constexpr KernelTable kScalarTable{Isa::Scalar, &scalar::iou_one_to_many,
                                   &scalar::inside_mask,
                                   &scalar::squared_distance};
#if defined(MFD_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::Avx2, &avx2::iou_one_to_many,
                                 &avx2::inside_mask, &avx2::squared_distance};
#endif

const KernelTable* detect() {
  if (const char* env = std::getenv("MFD_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &kScalarTable;
    if (want == "avx2" && isa_available(Isa::Avx2)) return &kernels_for(Isa::Avx2);
  }
  if (isa_available(Isa::Avx2)) return &kernels_for(Isa::Avx2);
  return &kScalarTable;
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(MFD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::runtime_error("kernel variant '" + std::string(isa_name(isa)) +
                             "' is not available");
  }
#if defined(MFD_HAVE_AVX2)
  if (isa == Isa::Avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

void select_isa(Isa isa) {
  active().store(&kernels_for(isa), std::memory_order_release);
}

BoxBuffer::BoxBuffer(std::span<const Box> boxes) {
  reserve(boxes.size());
  for (const Box& b : boxes) push_back(b);
}

void BoxBuffer::reserve(std::size_t n) {
  x1_.reserve(n);
  y1_.reserve(n);
  x2_.reserve(n);
  y2_.reserve(n);
}

void BoxBuffer::push_back(const Box& b) {
  x1_.push_back(b.x1());
  y1_.push_back(b.y1());
  x2_.push_back(b.x2());
  y2_.push_back(b.y2());
}

void BoxBuffer::set(std::size_t i, const Box& b) {
  x1_[i] = b.x1();
  y1_[i] = b.y1();
  x2_[i] = b.x2();
  y2_[i] = b.y2();
}

Box BoxBuffer::at(std::size_t i) const { return Box(x1_[i], y1_[i], x2_[i], y2_[i]); }

}  // namespace mfd::simd
