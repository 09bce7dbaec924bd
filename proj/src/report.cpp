#include "corrgroup/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "corrgroup/error.hpp"

namespace corrgroup {

const char* const kRecordCsvHeader =
    "algorithm,axis,level,trial,n_initial,n_grouped,n_correct,n_gt,precision,recall,wall_time_ns";
const char* const kTimingCsvHeader = "algorithm,n,repeats,mean_wall_time_ns,min_wall_time_ns,max_wall_time_ns";

namespace {

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string optional_real(const std::optional<double>& v) { return v ? real(*v) : std::string(); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_real(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

std::uint64_t parse_count(const std::string& s, std::size_t line_no) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError("line " + std::to_string(line_no) + ": bad count '" + s + "'");
  }
  return v;
}

}  // namespace

void write_records_csv(std::span<const EvaluationRecord> records, std::ostream& out) {
  out << kRecordCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.algorithm << ',' << r.axis << ',' << real(r.level) << ',' << r.trial << ',' << r.n_initial << ','
        << r.n_grouped << ',' << r.n_correct << ',' << r.n_gt_inliers << ',' << optional_real(r.precision) << ','
        << optional_real(r.recall) << ',' << r.wall_time_ns << '\n';
  }
}

std::vector<EvaluationRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordCsvHeader) throw ValidationError("line 1: unexpected CSV header");
  std::vector<EvaluationRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 11) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected 11 fields, got " + std::to_string(cells.size()));
    }
    EvaluationRecord r;
    r.algorithm = cells[0];
    r.axis = cells[1];
    r.level = parse_real(cells[2], line_no);
    r.trial = parse_count(cells[3], line_no);
    r.n_initial = parse_count(cells[4], line_no);
    r.n_grouped = parse_count(cells[5], line_no);
    r.n_correct = parse_count(cells[6], line_no);
    r.n_gt_inliers = parse_count(cells[7], line_no);
    if (!cells[8].empty()) r.precision = parse_real(cells[8], line_no);
    if (!cells[9].empty()) r.recall = parse_real(cells[9], line_no);
    r.wall_time_ns = parse_count(cells[10], line_no);
    records.push_back(std::move(r));
  }
  return records;
}

void write_records_json(std::span<const EvaluationRecord> records, std::ostream& out) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    o["algorithm"] = r.algorithm;
    o["axis"] = r.axis;
    o["level"] = r.level;
    o["trial"] = r.trial;
    o["n_initial"] = r.n_initial;
    o["n_grouped"] = r.n_grouped;
    o["n_correct"] = r.n_correct;
    o["n_gt"] = r.n_gt_inliers;
    o["precision"] = r.precision ? nlohmann::ordered_json(*r.precision) : nlohmann::ordered_json(nullptr);
    o["recall"] = r.recall ? nlohmann::ordered_json(*r.recall) : nlohmann::ordered_json(nullptr);
    o["wall_time_ns"] = r.wall_time_ns;
    arr.push_back(std::move(o));
  }
  out << arr.dump(2) << '\n';
}

std::vector<EvaluationRecord> read_records_json(std::istream& in) {
  nlohmann::json arr;
  try {
    in >> arr;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad JSON: ") + e.what());
  }
  if (!arr.is_array()) throw ValidationError("expected a JSON array of records");
  std::vector<EvaluationRecord> records;
  try {
    for (const auto& o : arr) {
      EvaluationRecord r;
      r.algorithm = o.at("algorithm").get<std::string>();
      r.axis = o.at("axis").get<std::string>();
      r.level = o.at("level").get<double>();
      r.trial = o.at("trial").get<std::size_t>();
      r.n_initial = o.at("n_initial").get<std::size_t>();
      r.n_grouped = o.at("n_grouped").get<std::size_t>();
      r.n_correct = o.at("n_correct").get<std::size_t>();
      r.n_gt_inliers = o.at("n_gt").get<std::size_t>();
      if (!o.at("precision").is_null()) r.precision = o.at("precision").get<double>();
      if (!o.at("recall").is_null()) r.recall = o.at("recall").get<double>();
      r.wall_time_ns = o.at("wall_time_ns").get<std::uint64_t>();
      records.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad record: ") + e.what());
  }
  return records;
}

void write_timing_csv(std::span<const TimingRow> rows, std::ostream& out) {
  out << kTimingCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.n << ',' << r.repeats << ',' << real(r.mean_wall_time_ns) << ','
        << r.min_wall_time_ns << ',' << r.max_wall_time_ns << '\n';
  }
}

std::vector<Series> aggregate(std::span<const EvaluationRecord> records, Metric metric) {
  // Algorithms keep first-appearance order; levels are sorted.
  std::vector<std::string> order;
  std::map<std::string, std::map<double, std::pair<double, std::size_t>>> sums;
  std::map<std::string, std::map<double, bool>> seen;
  for (const auto& r : records) {
    if (!sums.count(r.algorithm)) order.push_back(r.algorithm);
    auto& cell = sums[r.algorithm][r.level];
    const auto& v = metric == Metric::kPrecision ? r.precision : r.recall;
    if (v) {
      cell.first += *v;
      ++cell.second;
    }
  }
  std::vector<Series> out;
  for (const auto& name : order) {
    Series s{name, {}};
    for (const auto& [level, cell] : sums[name]) {
      SeriesPoint p{level, std::nullopt, cell.second};
      if (cell.second > 0) p.mean = cell.first / static_cast<double>(cell.second);
      s.points.push_back(p);
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
                                "#7f7f7f", "#bcbd22", "#17becf"};

void panel(std::ostream& out, const std::vector<Series>& series, const std::string& title, const std::string& axis,
           double ox, double oy) {
  const double w = 420, h = 300, left = 50, bottom = 40, top = 30, right = 110;
  const double pw = w - left - right, ph = h - top - bottom;
  double lo = 0, hi = 1;
  bool any = false;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      if (!any) lo = hi = p.level;
      lo = std::min(lo, p.level);
      hi = std::max(hi, p.level);
      any = true;
    }
  }
  if (hi == lo) hi = lo + 1;
  auto px = [&](double level) { return ox + left + (level - lo) / (hi - lo) * pw; };
  auto py = [&](double v) { return oy + top + (1.0 - v) * ph; };

  out << "<text x=\"" << real(ox + w / 2) << "\" y=\"" << real(oy + 18) << "\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";
  out << "<rect x=\"" << real(ox + left) << "\" y=\"" << real(oy + top) << "\" width=\"" << real(pw) << "\" height=\""
      << real(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    out << "<line x1=\"" << real(ox + left) << "\" x2=\"" << real(ox + left + pw) << "\" y1=\"" << real(py(v))
        << "\" y2=\"" << real(py(v)) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << real(ox + left - 6) << "\" y=\"" << real(py(v) + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">" << real(v) << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double level = lo + (hi - lo) * i / 4.0;
    char label[32];
    std::snprintf(label, sizeof(label), "%.3g", level);
    out << "<text x=\"" << real(px(level)) << "\" y=\"" << real(oy + top + ph + 14)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << label << "</text>\n";
  }
  out << "<text x=\"" << real(ox + left + pw / 2) << "\" y=\"" << real(oy + h - 6)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << axis << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    std::string d;
    bool pen_down = false;
    for (const auto& p : series[i].points) {
      if (!p.mean) {
        pen_down = false;
        continue;
      }
      d += (pen_down ? " L" : " M") + real(px(p.level)) + " " + real(py(*p.mean));
      pen_down = true;
      out << "<circle cx=\"" << real(px(p.level)) << "\" cy=\"" << real(py(*p.mean)) << "\" r=\"2.5\" fill=\"" << color
          << "\"/>\n";
    }
    if (!d.empty()) out << "<path d=\"" << d.substr(1) << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    const double ly = oy + top + 14.0 * static_cast<double>(i) + 8;
    out << "<line x1=\"" << real(ox + left + pw + 10) << "\" x2=\"" << real(ox + left + pw + 28) << "\" y1=\"" << real(ly)
        << "\" y2=\"" << real(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << real(ox + left + pw + 32) << "\" y=\"" << real(ly + 4) << "\" font-size=\"11\">"
        << series[i].algorithm << "</text>\n";
  }
}

}  // namespace

void write_sweep_svg(std::span<const EvaluationRecord> records, std::ostream& out) {
  const std::string axis = records.empty() ? std::string("level") : records.front().axis;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" height=\"300\" viewBox=\"0 0 840 300\" "
         "font-family=\"sans-serif\">\n"
      << "<rect width=\"840\" height=\"300\" fill=\"white\"/>\n";
  panel(out, aggregate(records, Metric::kPrecision), "precision", axis, 0, 0);
  panel(out, aggregate(records, Metric::kRecall), "recall", axis, 420, 0);
  out << "</svg>\n";
}

}  // namespace corrgroup
