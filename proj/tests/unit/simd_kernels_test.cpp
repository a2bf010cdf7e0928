#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "generators.hpp"
#include "mfd/simd/box_kernels.hpp"

namespace mfd::simd {
namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::vector<Box> edge_case_boxes() {
  return {Box(0, 0, 0, 0),      Box(0, 0, 10, 10),   Box(5, 0, 15, 10),   Box(10, 10, 10, 20),
          Box(-0.0, 0, 4, 4),   Box(0, -0.0, 4, 4),  Box(1e-300, 0, 1, 1), Box(0, 0, 1e6, 1e6),
          Box(3, 3, 3, 3),      Box(2, 2, 8, 8),     Box(0, 0, 10, 10),   Box(9.5, 9.5, 10.5, 10.5)};
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!isa_available(Isa::Avx2)) GTEST_SKIP() << "AVX2 unavailable on this host/build";
  }
  const KernelTable& ref_ = kernels_for(Isa::Scalar);
};

TEST(KernelDispatch, ScalarAlwaysAvailable) {
  EXPECT_TRUE(isa_available(Isa::Scalar));
  EXPECT_EQ(kernels_for(Isa::Scalar).isa, Isa::Scalar);
  EXPECT_EQ(isa_name(Isa::Avx2), "avx2");
}

TEST(KernelDispatch, SelectIsaSwitchesTable) {
  const Isa before = kernels().isa;
  select_isa(Isa::Scalar);
  EXPECT_EQ(kernels().isa, Isa::Scalar);
  select_isa(before);
  EXPECT_EQ(kernels().isa, before);
}

TEST(ScalarKernels, IouMatchesGeometry) {
  testing::Rng rng(1);
  std::vector<Box> boxes;
  for (int i = 0; i < 257; ++i) boxes.push_back(testing::random_box(rng, 300, 300, 90));
  BoxBuffer buf(boxes);
  std::vector<double> out(boxes.size());
  for (const Box& q : boxes) {
    scalar::iou_one_to_many(q, buf.columns(), out);
    for (std::size_t i = 0; i < boxes.size(); ++i) ASSERT_TRUE(same_bits(out[i], iou(q, boxes[i])));
  }
}

TEST_F(KernelEquivalence, IouBitIdentical) {
  const KernelTable& vec = kernels_for(Isa::Avx2);
  testing::Rng rng(2);
  for (int round = 0; round < 200; ++round) {
    std::vector<Box> boxes = edge_case_boxes();
    const int n = testing::uniform_int(rng, 0, 67);
    for (int i = 0; i < n; ++i) boxes.push_back(testing::random_box(rng, 500, 500, 150, round % 2 == 0));
    BoxBuffer buf(boxes);
    std::vector<double> a(boxes.size()), b(boxes.size());
    for (const Box& q : boxes) {
      ref_.iou_one_to_many(q, buf.columns(), a);
      vec.iou_one_to_many(q, buf.columns(), b);
      for (std::size_t i = 0; i < boxes.size(); ++i) ASSERT_TRUE(same_bits(a[i], b[i])) << i;
    }
  }
}

TEST_F(KernelEquivalence, InsideMaskIdentical) {
  const KernelTable& vec = kernels_for(Isa::Avx2);
  testing::Rng rng(3);
  for (int round = 0; round < 300; ++round) {
    const int n = testing::uniform_int(rng, 0, 203);
    std::vector<double> xs, ys;
    for (int i = 0; i < n; ++i) {
      // Integer-valued points hit box edges often.
      xs.push_back(std::floor(testing::uniform(rng, 0, 64)));
      ys.push_back(testing::uniform(rng, 0, 64));
    }
    const Box box = testing::random_int_box(rng, 64, 40);
    std::vector<std::uint8_t> a(xs.size()), b(xs.size());
    ref_.inside_mask(box, {xs, ys}, a);
    vec.inside_mask(box, {xs, ys}, b);
    ASSERT_EQ(a, b);
  }
}

TEST_F(KernelEquivalence, SquaredDistanceBitIdentical) {
  const KernelTable& vec = kernels_for(Isa::Avx2);
  testing::Rng rng(4);
  for (int round = 0; round < 300; ++round) {
    const int n = testing::uniform_int(rng, 0, 131);
    std::vector<double> xs, ys;
    for (int i = 0; i < n; ++i) {
      xs.push_back(testing::uniform(rng, -1e4, 1e4));
      ys.push_back(testing::uniform(rng, -1e4, 1e4));
    }
    const double cx = testing::uniform(rng, -1e4, 1e4), cy = testing::uniform(rng, -1e4, 1e4);
    std::vector<double> a(xs.size()), b(xs.size());
    ref_.squared_distance(cx, cy, {xs, ys}, a);
    vec.squared_distance(cx, cy, {xs, ys}, b);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_TRUE(same_bits(a[i], b[i]));
  }
}

TEST(BoxBufferTest, RoundTrip) {
  BoxBuffer buf;
  buf.push_back(Box(1, 2, 3, 4));
  buf.push_back(Box(0, 0, 5, 5));
  buf.set(0, Box(2, 2, 6, 6));
  EXPECT_EQ(buf.size(), 2u);
  EXPECT_EQ(buf.at(0), Box(2, 2, 6, 6));
  EXPECT_EQ(buf.columns().subspan(1).size(), 1u);
}

}  // namespace
}  // namespace mfd::simd
