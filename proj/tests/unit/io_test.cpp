#include <gtest/gtest.h>

#include <sstream>

#include "generators.hpp"
#include "mfd/config.hpp"
#include "mfd/io.hpp"

namespace mfd {
namespace {

std::vector<GroundTruthInstance> gt_from(const std::string& text) {
  std::istringstream in(text);
  return parse_gt(in, "gt.csv");
}

std::vector<PredictionRecord> preds_from(const std::string& text) {
  std::istringstream in(text);
  return parse_preds(in, "p.jsonl");
}

std::size_t error_line(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no ParseError";
  return 0;
}

TEST(ParseGtTest, WellFormed) {
  const auto g = gt_from(
      "page_id,class,x1,y1,x2,y2\n"
      "a,embedded,1,2,3,4\n"
      "a,Embedded,10,20,30,40\n"
      "\n"
      "b,ISOLATED,0,0,500.5,60\n");
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[1].label, ClassLabel::Embedded);
  EXPECT_EQ(g[2].label, ClassLabel::Isolated);
  EXPECT_EQ(g[2].box, Box(0, 0, 500.5, 60));
  EXPECT_EQ(g[2].page_id, "b");
}

TEST(ParseGtTest, FixtureFile) {
  const auto g = parse_gt(std::filesystem::path(MFD_FIXTURE_DIR) / "gt.csv");
  EXPECT_EQ(g.size(), 7u);
}

TEST(ParseGtTest, Errors) {
  const std::string h = "page_id,class,x1,y1,x2,y2\n";
  EXPECT_EQ(error_line([&] { gt_from(h + "a,embedded,1,1,2,2\na,embedded,5,0,3,4\n"); }), 3u);
  EXPECT_EQ(error_line([&] { gt_from(h + "a,formula,1,1,2,2\n"); }), 2u);
  EXPECT_EQ(error_line([&] { gt_from(h + "a,embedded,1,1,2\n"); }), 2u);
  EXPECT_EQ(error_line([&] { gt_from(h + "a,embedded,1,x,2,2\n"); }), 2u);
  EXPECT_EQ(error_line([&] { gt_from(h + ",embedded,1,1,2,2\n"); }), 2u);
  EXPECT_EQ(error_line([&] { gt_from(h + "a,embedded,1,1,2,2\na,embedded,1,1,2,2\n"); }), 3u);
  EXPECT_EQ(error_line([&] { gt_from("a,embedded,1,1,2,2\n"); }), 1u);
  try {
    gt_from(h + "a,embedded,5,0,3,4\n");
  } catch (const ParseError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("gt.csv:2:", 0), 0u) << e.what();
  }
  EXPECT_THROW(parse_gt(std::filesystem::path("/nonexistent/gt.csv")), std::runtime_error);
}

TEST(ParsePredsTest, Basics) {
  const auto p = preds_from(
      R"({"page_id":"a","class":"embedded","score":0.5,"box":[1,2,3,4]})"
      "\n"
      R"({"page_id":"b","class":"Isolated","score":1,"box":[0,0,10,10],"model_id":3,"extra":true})"
      "\n\n");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].det.model_id, 0);
  EXPECT_EQ(p[1].det.model_id, 3);
  EXPECT_EQ(p[1].det.label, ClassLabel::Isolated);
  EXPECT_TRUE(preds_from("").empty());
}

TEST(ParsePredsTest, Errors) {
  EXPECT_EQ(error_line([] { preds_from(R"({"page_id":"a","class":"embedded","score":1.2,"box":[1,2,3,4]})"); }), 1u);
  EXPECT_EQ(error_line([] { preds_from("\n" R"({"page_id":"a","class":"embedded","score":0.2,"box":[1,2,3]})"); }), 2u);
  EXPECT_EQ(error_line([] { preds_from(R"({"page_id":"a","class":"embedded","score":0.2,"box":[3,2,1,4]})"); }), 1u);
  EXPECT_EQ(error_line([] { preds_from(R"({"page_id":"a","class":"embedded","box":[1,2,3,4]})"); }), 1u);
  EXPECT_EQ(error_line([] { preds_from(R"({"page_id":"a","class":"embedded","score":0.2,"box":[1,2,3,4],"model_id":-1})"); }), 1u);
  EXPECT_EQ(error_line([] { preds_from("{not json"); }), 1u);
}

TEST(FormatTest, FixedSixDecimals) {
  EXPECT_EQ(format_fixed(1.0), "1.000000");
  EXPECT_EQ(format_fixed(-0.0), "0.000000");
  EXPECT_EQ(format_fixed(-1e-9), "0.000000");
  EXPECT_EQ(format_fixed(2.5e-4), "0.000250");
}

TEST(RoundTripTest, GtAndPredictions) {
  testing::Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    std::vector<GroundTruthInstance> gts;
    std::vector<PredictionRecord> preds;
    for (int i = 0; i < 40; ++i) {
      // Six-decimal values survive formatting unchanged.
      const auto six = [&](double v) { return std::round(v * 1e6) / 1e6; };
      const Box raw = testing::random_box(rng, 2000, 2000, 300);
      const Box b(six(raw.x1()), six(raw.y1()), six(std::max(raw.x1(), raw.x2())), six(std::max(raw.y1(), raw.y2())));
      const std::string page = "page_" + std::to_string(testing::uniform_int(rng, 0, 4));
      gts.push_back({page, testing::random_label(rng), Box(b.x1(), b.y1(), std::max(b.x1(), b.x2()) + i * 1e-6, b.y2())});
      preds.push_back({page, Detection(b, testing::random_label(rng), six(testing::uniform(rng, 0, 1)),
                                       testing::uniform_int(rng, 0, 3))});
    }
    std::ostringstream g_out, p_out;
    write_gt(g_out, gts);
    write_preds(p_out, preds);
    const auto g2 = gt_from(g_out.str());
    const auto p2 = preds_from(p_out.str());
    ASSERT_EQ(g2.size(), gts.size());
    ASSERT_EQ(p2.size(), preds.size());
    for (std::size_t i = 0; i < gts.size(); ++i) {
      EXPECT_EQ(g2[i].page_id, gts[i].page_id);
      EXPECT_EQ(g2[i].label, gts[i].label);
      EXPECT_NEAR(g2[i].box.x2(), gts[i].box.x2(), 5e-7);
      EXPECT_NEAR(g2[i].box.y1(), gts[i].box.y1(), 5e-7);
      EXPECT_EQ(p2[i].det.label, preds[i].det.label);
      EXPECT_EQ(p2[i].det.model_id, preds[i].det.model_id);
      EXPECT_NEAR(p2[i].det.score, preds[i].det.score, 5e-7);
      EXPECT_NEAR(p2[i].det.box.x1(), preds[i].det.box.x1(), 5e-7);
    }
    std::ostringstream g_again, p_again;
    write_gt(g_again, g2);
    write_preds(p_again, p2);
    EXPECT_EQ(g_again.str(), g_out.str());
    EXPECT_EQ(p_again.str(), p_out.str());
  }
}

TEST(DecodeRecordsTest, FixtureAndErrors) {
  const auto r = parse_decode_records(std::filesystem::path(MFD_FIXTURE_DIR) / "dists.jsonl");
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].point.level, 3);
  EXPECT_TRUE(r[0].label.has_value());
  EXPECT_FALSE(r[1].score.has_value());
  std::istringstream bad(R"({"page_id":"a","level":3,"x":1,"y":1,"dists":[[0.5,0.6],[1,0],[1,0],[1,0]]})");
  EXPECT_THROW(parse_decode_records(bad), ParseError);
}

TEST(RunConfigTest, DefaultsAndLevels) {
  const RunConfig c;
  EXPECT_EQ(c.pyramid(), PyramidSpec::range(2, 6, 24));
  EXPECT_EQ(c.atss_k, 9);
  EXPECT_EQ(c.nms_iou, 0.6);
  EXPECT_EQ(c.wbf_iou, 0.4);
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(parse_levels("3-7"), (std::vector<int>{3, 4, 5, 6, 7}));
  EXPECT_EQ(parse_levels("2,4,5"), (std::vector<int>{2, 4, 5}));
  EXPECT_THROW(parse_levels("6-2"), std::invalid_argument);
  EXPECT_THROW(parse_levels("a"), std::invalid_argument);
  RunConfig bad;
  bad.nms_iou = 1.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace mfd
