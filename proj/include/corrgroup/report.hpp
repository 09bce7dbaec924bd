#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corrgroup/evaluation.hpp"

namespace corrgroup {

/// algorithm,axis,level,trial,n_initial,n_grouped,n_correct,n_gt,precision,recall,wall_time_ns
extern const char* const kRecordCsvHeader;
extern const char* const kTimingCsvHeader;

// Reals are printed with 17 significant digits so reading back is exact.
// Undefined precision/recall are empty cells in CSV and null in JSON.
void write_records_csv(std::span<const EvaluationRecord> records, std::ostream& out);
std::vector<EvaluationRecord> read_records_csv(std::istream& in);

void write_records_json(std::span<const EvaluationRecord> records, std::ostream& out);
std::vector<EvaluationRecord> read_records_json(std::istream& in);

void write_timing_csv(std::span<const TimingRow> rows, std::ostream& out);

/// Mean of the defined values of a metric per (algorithm, level).
struct SeriesPoint {
  double level = 0.0;
  std::optional<double> mean;
  std::size_t defined = 0;
};
struct Series {
  std::string algorithm;
  std::vector<SeriesPoint> points;
};
enum class Metric { kPrecision, kRecall };
std::vector<Series> aggregate(std::span<const EvaluationRecord> records, Metric metric);

/// Standalone SVG with one panel per metric (precision, recall) vs level.
void write_sweep_svg(std::span<const EvaluationRecord> records, std::ostream& out);

}  // namespace corrgroup
