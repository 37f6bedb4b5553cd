#include "streamad/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "streamad/log.hpp"

namespace streamad {
namespace {

bool parse_line(const std::string& line, Record& out) {
  const size_t comma = line.find(',');
  if (comma == std::string::npos) return false;
  const auto ts = parse_timestamp(line.substr(0, comma));
  if (!ts.has_value()) return false;
  const std::string value_text = line.substr(comma + 1);
  char* end = nullptr;
  const double value = std::strtod(value_text.c_str(), &end);
  if (end == value_text.c_str() || !std::isfinite(value)) return false;
  out = Record{*ts, value};
  return true;
}

std::string chomp(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
    line.pop_back();
  }
  return line;
}

}  // namespace

RecordCsvReader::RecordCsvReader(std::istream& in, bool hard_fail)
    : in_(in), hard_fail_(hard_fail) {}

std::optional<Record> RecordCsvReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    line = chomp(line);
    if (line.empty()) continue;
    Record r;
    if (!parse_line(line, r)) {
      if (first_line_) {
        first_line_ = false;  // header row
        continue;
      }
      if (hard_fail_) {
        throw std::runtime_error("csv: malformed row at line " +
                                 std::to_string(line_number_));
      }
      log_warn("csv: skipping malformed row at line " +
               std::to_string(line_number_));
      ++skipped_;
      continue;
    }
    first_line_ = false;
    if (r.timestamp < last_timestamp_) {
      if (hard_fail_) {
        throw std::runtime_error("csv: timestamp moved backwards at line " +
                                 std::to_string(line_number_));
      }
      log_warn("csv: skipping out-of-order row at line " +
               std::to_string(line_number_));
      ++skipped_;
      continue;
    }
    last_timestamp_ = r.timestamp;
    return r;
  }
  return std::nullopt;
}

std::vector<Record> read_records_csv(std::istream& in, bool hard_fail,
                                     size_t* skipped_out) {
  RecordCsvReader reader(in, hard_fail);
  std::vector<Record> records;
  while (auto r = reader.next()) records.push_back(*r);
  if (skipped_out != nullptr) *skipped_out = reader.skipped();
  return records;
}

std::vector<Record> read_records_file(const std::string& path, bool hard_fail,
                                      size_t* skipped_out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  return read_records_csv(in, hard_fail, skipped_out);
}

void write_output_header(std::ostream& out) {
  out << "timestamp,value,raw_score,likelihood,flag\n";
}

void write_output_row(std::ostream& out, const AnomalyOutput& row) {
  char buf[128];
  std::snprintf(buf, sizeof buf, ",%.10g,%.6f,%.9f,%d\n", row.value,
                row.raw_score, row.likelihood, row.flag ? 1 : 0);
  out << format_timestamp(row.timestamp) << buf;
}

void write_multi_header(std::ostream& out, size_t model_count) {
  out << "timestamp";
  for (size_t i = 0; i < model_count; ++i) out << ",q_" << i;
  for (size_t i = 0; i < model_count; ++i) out << ",smoothed_" << i;
  out << ",likelihood,flag\n";
}

void write_multi_row(std::ostream& out, const MultiRow& row) {
  out << format_timestamp(row.timestamp);
  char buf[40];
  for (double q : row.tail_probabilities) {
    std::snprintf(buf, sizeof buf, ",%.6g", q);
    out << buf;
  }
  for (double s : row.smoothed) {
    std::snprintf(buf, sizeof buf, ",%.6g", s);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, ",%.9f,%d\n", row.likelihood,
                row.flag ? 1 : 0);
  out << buf;
}

void write_records_csv(std::ostream& out, const std::vector<Record>& records) {
  out << "timestamp,value\n";
  char buf[40];
  for (const Record& r : records) {
    std::snprintf(buf, sizeof buf, ",%.10g\n", r.value);
    out << format_timestamp(r.timestamp) << buf;
  }
}

}  // namespace streamad
