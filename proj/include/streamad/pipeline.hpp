#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "streamad/anomaly.hpp"
#include "streamad/encoder.hpp"
#include "streamad/multi.hpp"
#include "streamad/record.hpp"
#include "streamad/temporal_memory.hpp"

namespace streamad {

struct PipelineConfig {
  // resolution <= 0 requests auto-resolution, the default for pipelines:
  // the value range seen during probation divided by the divisor below.
  ScalarEncoderConfig scalar{.resolution = 0.0};
  double auto_resolution_divisor = 130.0;
  double min_resolution = 0.001;
  TimeEncoderConfig time_enc;
  TmConfig tm;
  LikelihoodConfig likelihood;
  double probation_fraction = 0.15;
  size_t probation_cap = 750;
  uint64_t seed = 42;
  bool hard_fail = false;  // malformed input rows abort instead of skipping

  void validate() const;
  size_t probation_length(std::optional<size_t> known_stream_length) const;
};

struct AnomalyOutput {
  int64_t timestamp = 0;
  double value = 0.0;
  double raw_score = 0.0;
  double likelihood = 0.5;
  bool flag = false;
};

/// One model: encoder -> column projection -> sequence memory -> likelihood,
/// advanced one record at a time with no look-ahead. Learning runs from the
/// first record; flags are suppressed and the score distribution is not yet
/// estimated during the probationary (auto-calibration) prefix. When the
/// scalar resolution is on auto, it follows the observed value range of the
/// probationary records and freezes when probation ends.
class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, std::optional<size_t> known_stream_length);

  AnomalyOutput process(const Record& record);

  size_t records_processed() const { return count_; }
  size_t flag_count() const { return flags_; }
  size_t probation_length() const { return probation_; }
  bool in_probation() const { return count_ < probation_; }
  double resolution() const { return encoder_.scalar.resolution; }
  /// Tail probability q of the most recent record (0.5 until the score
  /// distribution is live); feeds the multi-model combiner.
  double last_tail_probability() const { return last_q_; }
  const TemporalMemory& memory() const { return tm_; }

 private:
  PipelineConfig cfg_;
  size_t probation_;
  bool auto_resolution_;
  double seen_min_ = 0.0, seen_max_ = 0.0;
  RecordEncoder encoder_;
  ColumnProjector projector_;
  TemporalMemory tm_;
  AnomalyLikelihood likelihood_;
  Sdr prev_predicted_;
  size_t count_ = 0;
  size_t flags_ = 0;
  double last_q_ = 0.5;
};

/// Runs a whole record sequence through one pipeline. The probationary
/// length is taken from known_stream_length when given, else from the
/// sequence size.
std::vector<AnomalyOutput> run_stream(
    const std::vector<Record>& records, const PipelineConfig& cfg,
    std::optional<size_t> known_stream_length = std::nullopt);

struct MultiRow {
  int64_t timestamp = 0;
  std::vector<double> tail_probabilities;  // per model; 0.5 where padded
  std::vector<double> smoothed;
  double likelihood = 0.5;
  bool flag = false;
};

/// Runs one pipeline per stream (each on its own thread), aligns the
/// per-model tail probabilities on the union of the streams' timestamps
/// (missing steps pad a channel with the neutral 0.5), and emits one
/// combined row per timestep. Combined flags are suppressed until every
/// model is out of probation. Throws if the streams' time ranges do not
/// overlap.
std::vector<MultiRow> run_multi(const std::vector<std::vector<Record>>& streams,
                                const PipelineConfig& base_cfg,
                                const MultiConfig& multi_cfg);

}  // namespace streamad
