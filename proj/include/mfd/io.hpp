#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfd/detection.hpp"
#include "mfd/gfl_decode.hpp"
#include "mfd/postprocess.hpp"
#include "mfd/pyramid.hpp"

namespace mfd {

// A malformed input record. what() reads "<source>:<line>: <reason>".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& reason);

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

inline constexpr std::string_view kGtCsvHeader = "page_id,class,x1,y1,x2,y2";

// Ground truth CSV with header `page_id,class,x1,y1,x2,y2`. Class names are
// case-insensitive; blank lines are skipped; duplicate rows are rejected.
// Coordinates follow the Box convention (exclusive bottom-right corner), so
// annotations using inclusive corners need +1 on x2/y2 before import.
std::vector<GroundTruthInstance> parse_gt(std::istream& in,
                                          const std::string& source = "<input>");
std::vector<GroundTruthInstance> parse_gt(const std::filesystem::path& path);

// Prediction JSON lines:
//   {"page_id":str,"class":"embedded"|"isolated","score":float,
//    "box":[x1,y1,x2,y2],"model_id":int?}
// Unknown fields are ignored; a missing model_id reads as 0.
std::vector<PredictionRecord> parse_preds(std::istream& in,
                                          const std::string& source = "<input>");
std::vector<PredictionRecord> parse_preds(const std::filesystem::path& path);

// %.6f, with negative zero printed as 0.000000.
std::string format_fixed(double v);

void write_gt(std::ostream& out, std::span<const GroundTruthInstance> gts);

std::string prediction_json(const std::string& page_id, const Detection& d,
                            std::optional<std::size_t> cluster_size = std::nullopt);
void write_preds(std::ostream& out, std::span<const PredictionRecord> preds);

// One row per instance (page_id,class,short_side,levels,detectable) followed
// by a per-class summary block.
void write_coverage_csv(std::ostream& out, const CoverageReport& report);

struct ImbalanceRow {
  std::string page_id;
  ClassLabel label;
  double area;
  std::size_t positives_random;
  std::size_t positives_atss;
};

// One row per instance (page_id,class,area,positives_random,positives_atss)
// followed by a summary line with both log-area/count correlations.
void write_imbalance_csv(std::ostream& out, std::span<const ImbalanceRow> rows,
                         double correlation_random, double correlation_atss);


// One grid location with its four side distributions (left, top, right,
// bottom), read from JSON lines
//   {"page_id":str,"level":int,"x":float,"y":float,"dists":[[...],[...],[...],[...]]}
// Optional "class" and "score" fields are carried through to the decoded output.
struct DecodeRecord {
  std::size_t line = 0;
  std::string page_id;
  GridPoint point;
  SideDistributions sides;
  std::optional<ClassLabel> label;
  std::optional<double> score;
};

std::vector<DecodeRecord> parse_decode_records(std::istream& in,
                                               const std::string& source = "<input>");
std::vector<DecodeRecord> parse_decode_records(const std::filesystem::path& path);

}  // namespace mfd
