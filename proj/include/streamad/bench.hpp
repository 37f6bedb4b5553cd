#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "streamad/pipeline.hpp"
#include "streamad/record.hpp"

namespace streamad {

/// Labeled ground-truth interval; detections inside count as hits. Windows
/// within a stream must not overlap.
struct AnomalyWindow {
  int64_t start = 0;
  int64_t end = 0;
};

/// Scoring weights: hits earn tp_weight (scaled by how early in the window
/// they land), stray detections cost fp_weight, missed windows cost
/// fn_weight.
struct ApplicationProfile {
  std::string name;
  double tp_weight = 1.0;
  double fp_weight = -0.11;
  double fn_weight = -1.0;
};

ApplicationProfile standard_profile();
ApplicationProfile reward_low_fp_profile();
ApplicationProfile reward_low_fn_profile();
const std::vector<ApplicationProfile>& default_profiles();

/// Shape of the early-detection credit curve. The defaults give
/// sigm(6 - 12*relpos): ~1.0 at the window start, small but positive at the
/// window end.
struct PositionalWeighting {
  double steepness = 12.0;
  double offset = 6.0;
};

/// Positional weight of an in-window detection:
/// sigm(offset - steepness*relpos). Monotone decreasing in relpos.
double positional_weight(double relative_position,
                         const PositionalWeighting& shape = {});

struct StreamScore {
  double raw = 0.0;
  size_t tp = 0;
  size_t fp = 0;
  size_t fn = 0;
};

/// Window scoring: the first detection inside each window earns the
/// position-weighted tp_weight and later ones in the same window are
/// ignored; every detection outside all windows costs fp_weight; every
/// undetected window costs fn_weight. Detections must be sorted ascending
/// and already exclude the probationary period.
StreamScore score_stream(const std::vector<int64_t>& detections,
                         const std::vector<AnomalyWindow>& windows,
                         const ApplicationProfile& profile,
                         const PositionalWeighting& shape = {});

/// Linear rescale anchored at the idealized and the do-nothing detectors:
/// 100 * (raw - null_raw) / (perfect_raw - null_raw). Throws on degenerate
/// anchors (perfect_raw <= null_raw).
double normalize_corpus(double raw, double perfect_raw, double null_raw);

struct SlidingThresholdParams {
  size_t window = 100;      // trailing window length
  double deviations = 3.0;  // flag when value > mean + deviations * std
};

/// Spatial baseline: flags records whose value exceeds the trailing-window
/// mean by `deviations` standard deviations. Returns flagged timestamps.
std::vector<int64_t> baseline_sliding_threshold(
    const std::vector<Record>& records, const SlidingThresholdParams& params);

/// Chance baseline: flags each record independently with the given rate.
std::vector<int64_t> baseline_random(const std::vector<Record>& records,
                                     double rate, uint64_t seed);

// ---------------------------------------------------------------------------
// Corpus runs

struct CorpusStream {
  std::string name;
  std::vector<Record> records;
  std::vector<AnomalyWindow> windows;
};

struct BenchRow {
  std::string profile;
  std::string detector;
  double raw = 0.0;
  double normalized = 0.0;
  size_t tp = 0;
  size_t fp = 0;
  size_t fn = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::map<std::string, std::map<std::string, StreamScore>>
      per_stream;  // detector -> stream -> score (standard profile)
};

/// Runs the requested detectors over every corpus stream (streams in
/// parallel), scores them under each profile, and normalizes against the
/// perfect/null anchors. Detector names: "htm", "sliding_threshold",
/// "random".
BenchReport run_corpus(const std::vector<CorpusStream>& corpus,
                       const std::vector<ApplicationProfile>& profiles,
                       const std::vector<std::string>& detectors,
                       const PipelineConfig& htm_cfg,
                       const SlidingThresholdParams& threshold_params,
                       double random_rate, uint64_t random_seed);

std::string report_to_csv(const BenchReport& report);
std::string report_to_text(const BenchReport& report);

/// Labels JSON: {"stream_name": [["start","end"], ...], ...}. Timestamps use
/// the CSV timestamp format. Throws std::runtime_error on malformed input.
std::map<std::string, std::vector<AnomalyWindow>> parse_labels_json(
    const std::string& json_text);
std::string labels_to_json(
    const std::map<std::string, std::vector<AnomalyWindow>>& labels);

}  // namespace streamad
