#include "streamad/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include "streamad/hashing.hpp"
#include "streamad/log.hpp"

namespace streamad {

void PipelineConfig::validate() const {
  if (!(probation_fraction >= 0.0 && probation_fraction < 1.0)) {
    throw std::invalid_argument("pipeline: probation_fraction in [0,1)");
  }
  if (!(auto_resolution_divisor > 0.0) || !(min_resolution > 0.0)) {
    throw std::invalid_argument("pipeline: bad auto-resolution settings");
  }
  if (scalar.resolution > 0.0) {
    scalar.validate();
  } else {
    ScalarEncoderConfig probe = scalar;  // auto mode: check the other fields
    probe.resolution = min_resolution;
    probe.validate();
  }
  time_enc.validate();
  tm.validate();
  likelihood.validate();
}

size_t PipelineConfig::probation_length(
    std::optional<size_t> known_stream_length) const {
  if (!known_stream_length.has_value()) return probation_cap;
  const auto n = static_cast<double>(*known_stream_length);
  const auto by_fraction =
      static_cast<size_t>(std::ceil(probation_fraction * n));
  return std::min(by_fraction, probation_cap);
}

namespace {

PipelineConfig with_derived_seeds(PipelineConfig cfg) {
  cfg.scalar.seed = hash_combine(cfg.seed, 0x656e63ULL);
  cfg.tm.seed = hash_combine(cfg.seed, 0x746dULL);
  return cfg;
}

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg, std::optional<size_t> known_stream_length)
    : cfg_(with_derived_seeds(std::move(cfg))),
      probation_(cfg_.probation_length(known_stream_length)),
      auto_resolution_(cfg_.scalar.resolution <= 0.0),
      encoder_{cfg_.scalar, cfg_.time_enc},
      projector_(encoder_.total_width(), cfg_.tm.column_count,
                 hash_combine(cfg_.seed, 0x7370ULL)),
      tm_(cfg_.tm),
      likelihood_(cfg_.likelihood),
      prev_predicted_(cfg_.tm.column_count) {
  cfg_.validate();
  if (auto_resolution_) {
    encoder_.scalar.resolution = cfg_.min_resolution;
  }
}

AnomalyOutput Pipeline::process(const Record& record) {
  if (!std::isfinite(record.value)) {
    throw std::invalid_argument("pipeline: non-finite record value");
  }
  ++count_;
  const bool in_probation = count_ <= probation_;

  if (auto_resolution_ && count_ <= probation_) {
    seen_min_ = count_ == 1 ? record.value : std::min(seen_min_, record.value);
    seen_max_ = count_ == 1 ? record.value : std::max(seen_max_, record.value);
    encoder_.scalar.resolution =
        std::max((seen_max_ - seen_min_) / cfg_.auto_resolution_divisor,
                 cfg_.min_resolution);
  }

  const Sdr encoding = encoder_.encode(record.timestamp, record.value);
  const Sdr columns = projector_.project(encoding);
  auto stepped = tm_.step(columns, /*learn=*/true);

  AnomalyOutput out;
  out.timestamp = record.timestamp;
  out.value = record.value;
  if (stepped.active_columns.empty()) {
    log_debug("pipeline: empty column code, raw score carries no evidence");
  }
  out.raw_score = raw_score(prev_predicted_, stepped.active_columns);
  prev_predicted_ = std::move(stepped.predicted_next);

  // The probationary prefix calibrates the encoder and the sequence memory;
  // its raw scores would poison the score distribution, so estimation starts
  // when probation ends.
  if (!in_probation) {
    const LikelihoodUpdate lu = likelihood_.update(out.raw_score);
    out.likelihood = lu.likelihood;
    last_q_ = lu.tail_probability;
  } else {
    out.likelihood = 0.5;
    last_q_ = 0.5;
  }

  out.flag = likelihood_flag(out.likelihood, cfg_.likelihood, in_probation);
  if (out.flag) ++flags_;
  return out;
}

std::vector<AnomalyOutput> run_stream(const std::vector<Record>& records,
                                      const PipelineConfig& cfg,
                                      std::optional<size_t> known_stream_length) {
  Pipeline pipeline(cfg, known_stream_length.has_value()
                             ? known_stream_length
                             : std::optional<size_t>(records.size()));
  std::vector<AnomalyOutput> out;
  out.reserve(records.size());
  for (const Record& r : records) out.push_back(pipeline.process(r));
  return out;
}

std::vector<MultiRow> run_multi(const std::vector<std::vector<Record>>& streams,
                                const PipelineConfig& base_cfg,
                                const MultiConfig& multi_cfg) {
  multi_cfg.validate();
  if (streams.empty()) {
    throw std::invalid_argument("run_multi: no streams");
  }
  for (const auto& s : streams) {
    if (s.empty()) throw std::invalid_argument("run_multi: empty stream");
  }

  int64_t latest_start = INT64_MIN, earliest_end = INT64_MAX;
  for (const auto& s : streams) {
    latest_start = std::max(latest_start, s.front().timestamp);
    earliest_end = std::min(earliest_end, s.back().timestamp);
  }
  if (latest_start > earliest_end) {
    throw std::invalid_argument("run_multi: streams do not overlap in time");
  }

  // Each model runs independently over its own stream; the combiner then
  // consumes every per-step tail probability exactly once, in step order.
  const size_t m = streams.size();
  std::vector<std::map<int64_t, double>> q_by_time(m);
  std::vector<int64_t> probation_end(m, INT64_MIN);
  std::vector<std::thread> workers;
  workers.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    workers.emplace_back([&, i] {
      Pipeline pipeline(base_cfg, streams[i].size());
      for (size_t r = 0; r < streams[i].size(); ++r) {
        pipeline.process(streams[i][r]);
        if (r + 1 <= pipeline.probation_length()) {
          probation_end[i] = streams[i][r].timestamp;
        }
        q_by_time[i][streams[i][r].timestamp] =
            pipeline.last_tail_probability();
      }
    });
  }
  for (auto& w : workers) w.join();

  std::vector<int64_t> timeline;
  for (const auto& qs : q_by_time) {
    for (const auto& [ts, _] : qs) timeline.push_back(ts);
  }
  std::sort(timeline.begin(), timeline.end());
  timeline.erase(std::unique(timeline.begin(), timeline.end()),
                 timeline.end());

  const int64_t all_calibrated =
      *std::max_element(probation_end.begin(), probation_end.end());

  log_debug("multi: kernel pre-normalization mass " +
            std::to_string(kernel_raw_mass(multi_cfg.sigma,
                                           multi_cfg.kernel_span)));

  std::vector<ModelChannel> channels(m, ModelChannel(multi_cfg.kernel_span));
  std::vector<MultiRow> rows;
  rows.reserve(timeline.size());
  for (int64_t ts : timeline) {
    MultiRow row;
    row.timestamp = ts;
    row.tail_probabilities.reserve(m);
    for (size_t i = 0; i < m; ++i) {
      const auto it = q_by_time[i].find(ts);
      const double q = it == q_by_time[i].end() ? 0.5 : it->second;
      channels[i].push(q);
      row.tail_probabilities.push_back(q);
    }
    row.likelihood = combined_likelihood(channels, multi_cfg, row.smoothed);
    row.flag = ts > all_calibrated && multi_flag(row.likelihood, multi_cfg);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace streamad
