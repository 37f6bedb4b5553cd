#include "streamad/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "streamad/hashing.hpp"

namespace streamad {

ApplicationProfile standard_profile() { return {"standard", 1.0, -0.11, -1.0}; }
ApplicationProfile reward_low_fp_profile() {
  return {"reward_low_fp", 1.0, -0.22, -1.0};
}
ApplicationProfile reward_low_fn_profile() {
  return {"reward_low_fn", 1.0, -0.11, -2.0};
}

const std::vector<ApplicationProfile>& default_profiles() {
  static const std::vector<ApplicationProfile> profiles = {
      standard_profile(), reward_low_fp_profile(), reward_low_fn_profile()};
  return profiles;
}

double positional_weight(double relative_position,
                         const PositionalWeighting& shape) {
  return 1.0 /
         (1.0 + std::exp(-(shape.offset - shape.steepness * relative_position)));
}

StreamScore score_stream(const std::vector<int64_t>& detections,
                         const std::vector<AnomalyWindow>& windows,
                         const ApplicationProfile& profile,
                         const PositionalWeighting& shape) {
  if (!std::is_sorted(detections.begin(), detections.end())) {
    throw std::invalid_argument("score_stream: detections must be sorted");
  }
  if (!(profile.tp_weight > 0.0) || profile.fp_weight > 0.0 ||
      profile.fn_weight > 0.0) {
    throw std::invalid_argument("score_stream: bad profile weights");
  }
  for (size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].start >= windows[i].end) {
      throw std::invalid_argument("score_stream: empty window");
    }
    if (i > 0 && windows[i].start <= windows[i - 1].end) {
      throw std::invalid_argument("score_stream: overlapping windows");
    }
  }

  StreamScore score;
  std::vector<bool> credited(windows.size(), false);
  for (int64_t t : detections) {
    // Windows are sorted and disjoint; find the one containing t, if any.
    const auto it = std::upper_bound(
        windows.begin(), windows.end(), t,
        [](int64_t v, const AnomalyWindow& w) { return v < w.start; });
    bool inside = false;
    if (it != windows.begin()) {
      const size_t idx = static_cast<size_t>(it - windows.begin()) - 1;
      const AnomalyWindow& w = windows[idx];
      if (t <= w.end) {
        inside = true;
        if (!credited[idx]) {
          credited[idx] = true;
          ++score.tp;
          const double relpos = static_cast<double>(t - w.start) /
                                static_cast<double>(w.end - w.start);
          score.raw += profile.tp_weight * positional_weight(relpos, shape);
        }
      }
    }
    if (!inside) {
      ++score.fp;
      score.raw += profile.fp_weight;
    }
  }
  for (size_t i = 0; i < windows.size(); ++i) {
    if (!credited[i]) {
      ++score.fn;
      score.raw += profile.fn_weight;
    }
  }
  return score;
}

double normalize_corpus(double raw, double perfect_raw, double null_raw) {
  if (!(perfect_raw > null_raw)) {
    throw std::invalid_argument("normalize_corpus: degenerate anchors");
  }
  return 100.0 * (raw - null_raw) / (perfect_raw - null_raw);
}

std::vector<int64_t> baseline_sliding_threshold(
    const std::vector<Record>& records, const SlidingThresholdParams& params) {
  if (params.window < 2) {
    throw std::invalid_argument("sliding_threshold: window must be >= 2");
  }
  std::vector<int64_t> detections;
  std::vector<double> ring(params.window, 0.0);
  double sum = 0.0, sumsq = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < records.size(); ++i) {
    const double v = records[i].value;
    // Compare against the trailing window before the current record enters.
    if (n >= 2) {
      const double k = static_cast<double>(std::min(n, params.window));
      const double mean = sum / k;
      const double var = std::max((sumsq - sum * mean) / (k - 1.0), 1e-12);
      if (v > mean + params.deviations * std::sqrt(var)) {
        detections.push_back(records[i].timestamp);
      }
    }
    if (n >= params.window) {
      const double old = ring[i % params.window];
      sum -= old;
      sumsq -= old * old;
    }
    ring[i % params.window] = v;
    sum += v;
    sumsq += v * v;
    ++n;
  }
  return detections;
}

std::vector<int64_t> baseline_random(const std::vector<Record>& records,
                                     double rate, uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw std::invalid_argument("random baseline: rate must be in [0,1]");
  }
  std::mt19937_64 rng(seed);
  std::vector<int64_t> detections;
  for (const Record& r : records) {
    if (draw_unit(rng) < rate) detections.push_back(r.timestamp);
  }
  return detections;
}

namespace {

std::vector<int64_t> htm_detections(const CorpusStream& stream,
                                    const PipelineConfig& cfg) {
  std::vector<int64_t> out;
  for (const AnomalyOutput& row : run_stream(stream.records, cfg)) {
    if (row.flag) out.push_back(row.timestamp);
  }
  return out;
}

// Baselines have no probationary handling of their own; drop their
// detections inside the same calibration prefix the pipeline uses so the
// scoring treats all detectors alike.
std::vector<int64_t> drop_probation(std::vector<int64_t> detections,
                                    const CorpusStream& stream,
                                    const PipelineConfig& cfg) {
  const size_t probation = cfg.probation_length(stream.records.size());
  if (probation == 0 || stream.records.empty()) return detections;
  const size_t last = std::min(probation, stream.records.size()) - 1;
  const int64_t cutoff = stream.records[last].timestamp;
  std::erase_if(detections, [cutoff](int64_t t) { return t <= cutoff; });
  return detections;
}

}  // namespace

BenchReport run_corpus(const std::vector<CorpusStream>& corpus,
                       const std::vector<ApplicationProfile>& profiles,
                       const std::vector<std::string>& detectors,
                       const PipelineConfig& htm_cfg,
                       const SlidingThresholdParams& threshold_params,
                       double random_rate, uint64_t random_seed) {
  for (const auto& name : detectors) {
    if (name != "htm" && name != "sliding_threshold" && name != "random") {
      throw std::invalid_argument("run_corpus: unknown detector " + name);
    }
  }

  // detector -> stream index -> detections, streams evaluated in parallel.
  std::map<std::string, std::vector<std::vector<int64_t>>> detections;
  for (const auto& name : detectors) {
    detections[name].resize(corpus.size());
  }
  std::vector<std::future<void>> tasks;
  tasks.reserve(corpus.size());
  for (size_t s = 0; s < corpus.size(); ++s) {
    tasks.push_back(std::async(std::launch::async, [&, s] {
      for (const auto& name : detectors) {
        std::vector<int64_t> d;
        if (name == "htm") {
          d = htm_detections(corpus[s], htm_cfg);
        } else if (name == "sliding_threshold") {
          d = drop_probation(
              baseline_sliding_threshold(corpus[s].records, threshold_params),
              corpus[s], htm_cfg);
        } else {
          d = drop_probation(
              baseline_random(corpus[s].records, random_rate,
                              hash_combine(random_seed, s)),
              corpus[s], htm_cfg);
        }
        detections[name][s] = std::move(d);
      }
    }));
  }
  for (auto& t : tasks) t.get();

  BenchReport report;
  for (const auto& profile : profiles) {
    // Anchors: every window detected at its start vs. no detections at all.
    double perfect_raw = 0.0, null_raw = 0.0;
    for (const auto& stream : corpus) {
      perfect_raw += profile.tp_weight * positional_weight(0.0) *
                     static_cast<double>(stream.windows.size());
      null_raw += profile.fn_weight * static_cast<double>(stream.windows.size());
    }
    for (const auto& name : detectors) {
      BenchRow row;
      row.profile = profile.name;
      row.detector = name;
      for (size_t s = 0; s < corpus.size(); ++s) {
        const StreamScore sc =
            score_stream(detections[name][s], corpus[s].windows, profile);
        row.raw += sc.raw;
        row.tp += sc.tp;
        row.fp += sc.fp;
        row.fn += sc.fn;
        if (profile.name == "standard") {
          report.per_stream[name][corpus[s].name] = sc;
        }
      }
      row.normalized = normalize_corpus(row.raw, perfect_raw, null_raw);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::string report_to_csv(const BenchReport& report) {
  std::string out = "profile,detector,raw,normalized,tp,fp,fn\n";
  char buf[160];
  for (const BenchRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.4f,%.2f,%zu,%zu,%zu\n",
                  r.profile.c_str(), r.detector.c_str(), r.raw, r.normalized,
                  r.tp, r.fp, r.fn);
    out += buf;
  }
  return out;
}

std::string report_to_text(const BenchReport& report) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-16s %-18s %10s %10s %5s %5s %5s\n",
                "profile", "detector", "raw", "score", "tp", "fp", "fn");
  out += buf;
  for (const BenchRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%-16s %-18s %10.4f %10.2f %5zu %5zu %5zu\n",
                  r.profile.c_str(), r.detector.c_str(), r.raw, r.normalized,
                  r.tp, r.fp, r.fn);
    out += buf;
  }
  return out;
}

std::map<std::string, std::vector<AnomalyWindow>> parse_labels_json(
    const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("labels: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw std::runtime_error("labels: top level must be an object");
  }
  std::map<std::string, std::vector<AnomalyWindow>> out;
  for (const auto& [name, ranges] : j.items()) {
    std::vector<AnomalyWindow> windows;
    for (const auto& range : ranges) {
      if (!range.is_array() || range.size() != 2) {
        throw std::runtime_error("labels: window must be [start, end]");
      }
      const auto start = parse_timestamp(range[0].get<std::string>());
      const auto end = parse_timestamp(range[1].get<std::string>());
      if (!start || !end || *start >= *end) {
        throw std::runtime_error("labels: bad window in stream " + name);
      }
      windows.push_back({*start, *end});
    }
    std::sort(windows.begin(), windows.end(),
              [](const AnomalyWindow& a, const AnomalyWindow& b) {
                return a.start < b.start;
              });
    out[name] = std::move(windows);
  }
  return out;
}

std::string labels_to_json(
    const std::map<std::string, std::vector<AnomalyWindow>>& labels) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, windows] : labels) {
    nlohmann::json ranges = nlohmann::json::array();
    for (const AnomalyWindow& w : windows) {
      ranges.push_back({format_timestamp(w.start), format_timestamp(w.end)});
    }
    j[name] = std::move(ranges);
  }
  return j.dump(2) + "\n";
}

}  // namespace streamad
