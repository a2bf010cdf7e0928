#include "mfd/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "json.hpp"
#include "mfd/config.hpp"

namespace mfd {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

ParseError::ParseError(std::string source, std::size_t line, const std::string& reason)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + reason),
      source_(std::move(source)),
      line_(line) {}

std::vector<GroundTruthInstance> parse_gt(std::istream& in, const std::string& source) {
  std::vector<GroundTruthInstance> out;
  std::set<std::tuple<std::string, int, double, double, double, double>> seen;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (!header_seen) {
      std::string compact;
      for (const auto f : split(line, ',')) {
        if (!compact.empty()) compact += ',';
        compact += f;
      }
      if (compact != kGtCsvHeader) {
        throw ParseError(source, line_no,
                         "expected header '" + std::string(kGtCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 6) {
      throw ParseError(source, line_no,
                       "expected 6 fields, found " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ParseError(source, line_no, "empty page_id");
    const auto label = parse_class_label(fields[1]);
    if (!label) {
      throw ParseError(source, line_no, "unknown class '" + std::string(fields[1]) + "'");
    }
    double c[4];
    for (int i = 0; i < 4; ++i) {
      const auto v = to_double(fields[2 + i]);
      if (!v) {
        throw ParseError(source, line_no,
                         "malformed coordinate '" + std::string(fields[2 + i]) + "'");
      }
      c[i] = *v;
    }
    GroundTruthInstance gt{std::string(fields[0]), *label, Box()};
    try {
      gt.box = Box(c[0], c[1], c[2], c[3]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, line_no, e.what());
    }
    if (!seen.emplace(gt.page_id, static_cast<int>(gt.label), c[0], c[1], c[2], c[3]).second) {
      throw ParseError(source, line_no, "duplicate ground-truth row");
    }
    out.push_back(std::move(gt));
  }
  if (!header_seen && line_no > 0) {
    throw ParseError(source, line_no, "missing header");
  }
  return out;
}

std::vector<GroundTruthInstance> parse_gt(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_gt(in, path.string());
}

std::vector<PredictionRecord> parse_preds(std::istream& in, const std::string& source) {
  std::vector<PredictionRecord> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (trim(raw).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    const auto fail = [&](const std::string& why) { throw ParseError(source, line_no, why); };
    if (!j.is_object()) fail("record is not a JSON object");

    const auto page = j.find("page_id");
    if (page == j.end() || !page->is_string() || page->get<std::string>().empty()) {
      fail("missing or empty string field 'page_id'");
    }
    const auto cls = j.find("class");
    if (cls == j.end() || !cls->is_string()) fail("missing string field 'class'");
    const auto label = parse_class_label(cls->get<std::string>());
    if (!label) fail("unknown class '" + cls->get<std::string>() + "'");

    const auto score = j.find("score");
    if (score == j.end() || !score->is_number()) fail("missing numeric field 'score'");
    const double s = score->get<double>();
    if (!(s >= 0.0 && s <= 1.0)) fail("score " + std::to_string(s) + " outside [0, 1]");

    const auto box = j.find("box");
    if (box == j.end() || !box->is_array() || box->size() != 4) {
      fail("field 'box' must be an array [x1, y1, x2, y2]");
    }
    double c[4];
    for (std::size_t i = 0; i < 4; ++i) {
      if (!(*box)[i].is_number()) fail("box coordinates must be numbers");
      c[i] = (*box)[i].get<double>();
    }

    int model_id = 0;
    if (const auto m = j.find("model_id"); m != j.end()) {
      if (!m->is_number_integer() || m->get<long long>() < 0) {
        fail("model_id must be a non-negative integer");
      }
      model_id = m->get<int>();
    }

    try {
      out.push_back({page->get<std::string>(),
                     Detection(Box(c[0], c[1], c[2], c[3]), *label, s, model_id)});
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  return out;
}

std::vector<PredictionRecord> parse_preds(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_preds(in, path.string());
}

std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s.erase(0, 1);
  return s;
}

void write_gt(std::ostream& out, std::span<const GroundTruthInstance> gts) {
  out << kGtCsvHeader << '\n';
  for (const GroundTruthInstance& g : gts) {
    out << g.page_id << ',' << to_string(g.label) << ',' << format_fixed(g.box.x1()) << ','
        << format_fixed(g.box.y1()) << ',' << format_fixed(g.box.x2()) << ','
        << format_fixed(g.box.y2()) << '\n';
  }
}

std::string prediction_json(const std::string& page_id, const Detection& d,
                            std::optional<std::size_t> cluster_size) {
  std::string s = "{\"page_id\":" + nlohmann::json(page_id).dump() + ",\"class\":\"" +
                  std::string(to_string(d.label)) + "\",\"score\":" + format_fixed(d.score) +
                  ",\"box\":[" + format_fixed(d.box.x1()) + ',' + format_fixed(d.box.y1()) +
                  ',' + format_fixed(d.box.x2()) + ',' + format_fixed(d.box.y2()) +
                  "],\"model_id\":" + std::to_string(d.model_id);
  if (cluster_size) s += ",\"cluster_size\":" + std::to_string(*cluster_size);
  s += '}';
  return s;
}

void write_preds(std::ostream& out, std::span<const PredictionRecord> preds) {
  for (const PredictionRecord& r : preds) out << prediction_json(r.page_id, r.det) << '\n';
}

void write_coverage_csv(std::ostream& out, const CoverageReport& report) {
  out << "page_id,class,short_side,levels,detectable\n";
  for (const CoverageEntry& e : report.entries) {
    out << e.page_id << ',' << to_string(e.label) << ',' << format_fixed(e.short_side) << ',';
    for (std::size_t i = 0; i < e.levels.size(); ++i) out << (i ? ";" : "") << e.levels[i];
    out << ',' << (e.covered() ? 1 : 0) << '\n';
  }
  out << "\n# summary\nclass,instances,undetectable\n";
  for (const ClassLabel c : kAllClasses) {
    const CoverageCounts& cc = report.per_class[class_index(c)];
    out << to_string(c) << ',' << cc.instances << ',' << cc.flagged << '\n';
  }
  out << "total," << report.total.instances << ',' << report.total.flagged << '\n';
}

void write_imbalance_csv(std::ostream& out, std::span<const ImbalanceRow> rows,
                         double correlation_random, double correlation_atss) {
  out << "page_id,class,area,positives_random,positives_atss\n";
  for (const ImbalanceRow& r : rows) {
    out << r.page_id << ',' << to_string(r.label) << ',' << format_fixed(r.area) << ','
        << r.positives_random << ',' << r.positives_atss << '\n';
  }
  out << "# summary instances=" << rows.size()
      << " pearson_random=" << format_fixed(correlation_random)
      << " pearson_atss=" << format_fixed(correlation_atss) << '\n';
}

void RunConfig::validate() const {
  (void)pyramid();
  if (atss_k < 1) throw std::invalid_argument("atss k must be >= 1");
  for (const double t : {nms_iou, wbf_iou, eval_iou, min_score}) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw std::invalid_argument("thresholds must be in [0, 1]");
    }
  }
  if (!(image_width > 0.0) || !(image_height > 0.0)) {
    throw std::invalid_argument("image size must be positive");
  }
}

std::vector<int> parse_levels(std::string_view text) {
  const auto to_int = [&](std::string_view s) {
    int v = 0;
    s = trim(s);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      throw std::invalid_argument("malformed pyramid levels '" + std::string(text) + "'");
    }
    return v;
  };
  std::vector<int> levels;
  if (const auto dash = text.find('-'); dash != std::string_view::npos) {
    const int lo = to_int(text.substr(0, dash));
    const int hi = to_int(text.substr(dash + 1));
    if (hi < lo) throw std::invalid_argument("pyramid level range is empty");
    for (int l = lo; l <= hi; ++l) levels.push_back(l);
  } else {
    for (const auto part : split(text, ',')) levels.push_back(to_int(part));
  }
  (void)PyramidSpec(levels, 1);
  return levels;
}


std::vector<DecodeRecord> parse_decode_records(std::istream& in, const std::string& source) {
  std::vector<DecodeRecord> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (trim(raw).empty()) continue;
    const auto fail = [&](const std::string& why) { throw ParseError(source, line_no, why); };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
      fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("record is not a JSON object");
    const auto page = j.find("page_id");
    if (page == j.end() || !page->is_string() || page->get<std::string>().empty()) {
      fail("missing or empty string field 'page_id'");
    }
    const auto level = j.find("level");
    if (level == j.end() || !level->is_number_integer()) fail("missing integer field 'level'");
    const auto x = j.find("x");
    const auto y = j.find("y");
    if (x == j.end() || !x->is_number() || y == j.end() || !y->is_number()) {
      fail("missing numeric fields 'x'/'y'");
    }
    const auto dists = j.find("dists");
    if (dists == j.end() || !dists->is_array() || dists->size() != 4) {
      fail("field 'dists' must hold four distributions");
    }
    std::vector<SideDistribution> sides;
    for (const auto& d : *dists) {
      if (!d.is_array()) fail("each distribution must be an array of numbers");
      std::vector<double> p;
      for (const auto& v : d) {
        if (!v.is_number()) fail("each distribution must be an array of numbers");
        p.push_back(v.get<double>());
      }
      try {
        sides.emplace_back(std::move(p));
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
    }
    DecodeRecord r{line_no, page->get<std::string>(),
                   GridPoint{x->get<double>(), y->get<double>(), level->get<int>()},
                   SideDistributions{sides[0], sides[1], sides[2], sides[3]},
                   std::nullopt, std::nullopt};
    if (const auto cls = j.find("class"); cls != j.end()) {
      if (!cls->is_string()) fail("field 'class' must be a string");
      r.label = parse_class_label(cls->get<std::string>());
      if (!r.label) fail("unknown class '" + cls->get<std::string>() + "'");
    }
    if (const auto s = j.find("score"); s != j.end()) {
      if (!s->is_number()) fail("field 'score' must be a number");
      r.score = s->get<double>();
      if (!(*r.score >= 0.0 && *r.score <= 1.0)) fail("score outside [0, 1]");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DecodeRecord> parse_decode_records(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_decode_records(in, path.string());
}

}  // namespace mfd
