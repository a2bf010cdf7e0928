#include <gtest/gtest.h>

#include <limits>

#include "generators.hpp"
#include "mfd/geometry.hpp"
#include "oracles.hpp"

namespace mfd {
namespace {

TEST(BoxTest, RejectsNegativeExtentAndNonFinite) {
  EXPECT_THROW(Box(10, 0, 5, 10), std::invalid_argument);
  EXPECT_THROW(Box(0, 10, 10, 5), std::invalid_argument);
  EXPECT_THROW(Box(0, 0, std::numeric_limits<double>::infinity(), 1), std::invalid_argument);
  EXPECT_THROW(Box(std::numeric_limits<double>::quiet_NaN(), 0, 1, 1), std::invalid_argument);
  EXPECT_NO_THROW(Box(5, 5, 5, 9));
}

TEST(BoxTest, Area) {
  EXPECT_DOUBLE_EQ(area(Box(0, 0, 10, 10)), 100.0);
  EXPECT_DOUBLE_EQ(area(Box(5, 5, 5, 9)), 0.0);
  EXPECT_DOUBLE_EQ(area(Box(0, 0, 3, 7)), 21.0);
}

TEST(BoxTest, IouExamples) {
  const Box a(0, 0, 10, 10);
  EXPECT_EQ(iou(a, a), 1.0);
  EXPECT_EQ(iou(a, Box(20, 20, 30, 30)), 0.0);
  // Intersection 50, union 150 per the pixel-count oracle.
  const Box b(5, 0, 15, 10);
  EXPECT_DOUBLE_EQ(oracle::pixel_count_iou(a, b), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(iou(a, b), 1.0 / 3.0);
}

TEST(BoxTest, IouOfEmptyUnionIsZero) {
  EXPECT_EQ(iou(Box(3, 3, 3, 3), Box(3, 3, 3, 3)), 0.0);
  EXPECT_EQ(iou(Box(0, 0, 0, 5), Box(0, 0, 0, 5)), 0.0);
}

TEST(BoxTest, IouMatchesPixelOracleOnIntegerBoxes) {
  testing::Rng rng(7);
  for (int t = 0; t < 2000; ++t) {
    const Box a = testing::random_int_box(rng, 40, 25);
    const Box b = testing::random_int_box(rng, 40, 25);
    ASSERT_NEAR(iou(a, b), oracle::pixel_count_iou(a, b), 1e-9) << t;
  }
}

TEST(BoxTest, IouSymmetricAndSelfIsOne) {
  testing::Rng rng(11);
  for (int t = 0; t < 5000; ++t) {
    const Box a = testing::random_box(rng, 500, 500, 120);
    const Box b = testing::random_box(rng, 500, 500, 120);
    ASSERT_EQ(iou(a, b), iou(b, a));
    const double v = iou(a, b);
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0);
    if (area(a) > 0) {
      ASSERT_EQ(iou(a, a), 1.0);
    }
  }
}

TEST(HflipTest, Examples) {
  EXPECT_EQ(hflip(Box(0, 0, 10, 10), 100), Box(90, 0, 100, 10));
  EXPECT_EQ(hflip(Box(45, 2, 55, 8), 100), Box(45, 2, 55, 8));
  EXPECT_THROW(hflip(Box(95, 0, 101, 4), 100), std::invalid_argument);
  EXPECT_THROW(hflip(Box(-1, 0, 10, 4), 100), std::invalid_argument);
}

TEST(HflipTest, InvolutionAndPreservedExtents) {
  testing::Rng rng(3);
  for (int t = 0; t < 10000; ++t) {
    const double w = testing::quantize(testing::uniform(rng, 16, 4096));
    const Box b = testing::random_box(rng, w, 3000, 600, /*quantized=*/true);
    const Box f = hflip(b, w);
    ASSERT_EQ(hflip(f, w), b);
    ASSERT_EQ(f.width(), b.width());
    ASSERT_EQ(f.height(), b.height());
    ASSERT_EQ(area(f), area(b));
  }
}

TEST(HflipTest, InvolutionOnArbitraryRealsWithinRounding) {
  testing::Rng rng(4);
  for (int t = 0; t < 10000; ++t) {
    const double w = testing::uniform(rng, 16, 4096);
    const Box b = testing::random_box(rng, w, 3000, 600);
    const Box back = hflip(hflip(b, w), w);
    ASSERT_NEAR(back.x1(), b.x1(), 1e-12 * w);
    ASSERT_NEAR(back.x2(), b.x2(), 1e-12 * w);
    ASSERT_EQ(back.y1(), b.y1());
    ASSERT_EQ(back.y2(), b.y2());
  }
}

TEST(ClassLabelTest, ParseIsCaseInsensitive) {
  EXPECT_EQ(parse_class_label("Embedded"), ClassLabel::Embedded);
  EXPECT_EQ(parse_class_label("ISOLATED"), ClassLabel::Isolated);
  EXPECT_EQ(parse_class_label("isolated"), ClassLabel::Isolated);
  EXPECT_FALSE(parse_class_label("inline").has_value());
  EXPECT_FALSE(parse_class_label("").has_value());
  EXPECT_EQ(to_string(ClassLabel::Embedded), "embedded");
  EXPECT_EQ(to_string(ClassLabel::Isolated), "isolated");
}

}  // namespace
}  // namespace mfd
