#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "streamad/pipeline.hpp"
#include "streamad/record.hpp"

namespace streamad {

/// Streaming reader for `timestamp,value` CSV. A leading header row is
/// detected and skipped. Malformed rows and rows whose timestamps go
/// backwards are skipped with a warning (or abort the run when hard_fail is
/// set); skips are counted.
class RecordCsvReader {
 public:
  RecordCsvReader(std::istream& in, bool hard_fail);

  /// Next well-formed record, or nullopt at end of input.
  std::optional<Record> next();

  size_t skipped() const { return skipped_; }

 private:
  std::istream& in_;
  bool hard_fail_;
  bool first_line_ = true;
  int64_t last_timestamp_ = INT64_MIN;
  size_t line_number_ = 0;
  size_t skipped_ = 0;
};

/// Reads a whole stream into memory. skipped_out, when given, receives the
/// number of dropped rows.
std::vector<Record> read_records_csv(std::istream& in, bool hard_fail,
                                     size_t* skipped_out = nullptr);
std::vector<Record> read_records_file(const std::string& path, bool hard_fail,
                                      size_t* skipped_out = nullptr);

void write_output_header(std::ostream& out);
void write_output_row(std::ostream& out, const AnomalyOutput& row);

void write_multi_header(std::ostream& out, size_t model_count);
void write_multi_row(std::ostream& out, const MultiRow& row);

void write_records_csv(std::ostream& out, const std::vector<Record>& records);

}  // namespace streamad
