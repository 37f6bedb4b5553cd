#include "streamad/synth.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "streamad/hashing.hpp"

namespace streamad {
namespace {

constexpr int64_t kStepSeconds = 300;  // 5-minute cadence
// 2016-02-01 00:00:00 UTC
constexpr int64_t kBaseTimestamp = 1454284800;

int64_t ts_at(size_t i) {
  return kBaseTimestamp + static_cast<int64_t>(i) * kStepSeconds;
}

std::vector<Record> make_series(size_t n) {
  std::vector<Record> r(n);
  for (size_t i = 0; i < n; ++i) r[i].timestamp = ts_at(i);
  return r;
}

LabeledStream make_cycle(uint64_t seed, size_t n) {
  (void)seed;
  if (n == 0) n = 1200;
  LabeledStream s;
  s.name = "cycle";
  s.records = make_series(n);
  // Asymmetric daily ramp: 18 rising steps then 6 falling ones, with all 24
  // levels distinct so every transition in the cycle is unambiguous.
  for (size_t i = 0; i < n; ++i) {
    const size_t p = i % 24;
    s.records[i].value = p < 18 ? 30.0 + 2.0 * static_cast<double>(p)
                                : 65.0 - 6.0 * static_cast<double>(p - 18);
  }
  return s;
}

LabeledStream make_level_shift(uint64_t seed, size_t n) {
  (void)seed;
  if (n == 0) n = 2400;
  LabeledStream s;
  s.name = "level_shift";
  s.records = make_series(n);
  const size_t shift_at = (n * 3) / 5;
  // Second harmonic keeps the 24 daily levels distinct (no mirror pairs).
  for (size_t i = 0; i < n; ++i) {
    const double base = i < shift_at ? 20.0 : 35.0;
    const double phase = 2.0 * M_PI * (i % 24) / 24.0;
    s.records[i].value = base + 0.3 * std::sin(phase) +
                         0.12 * std::sin(2.0 * phase + 1.0);
  }
  s.windows.push_back({ts_at(shift_at), ts_at(shift_at + 48)});
  return s;
}

LabeledStream make_temperature(uint64_t seed, size_t n) {
  if (n == 0) n = 4000;
  LabeledStream s;
  s.name = "temperature";
  s.records = make_series(n);
  std::mt19937_64 rng(mix64(seed ^ 0x74656d70ULL));
  // Asymmetric daily wave (second harmonic breaks the mirror symmetry of a
  // plain sine, so the 24 levels stay distinct) plus a slow drift.
  for (size_t i = 0; i < n; ++i) {
    const double phase = 2.0 * M_PI * (i % 24) / 24.0;
    s.records[i].value = 80.0 + 5.0 * std::sin(phase) +
                         2.0 * std::sin(2.0 * phase + 1.0) +
                         0.0001 * static_cast<double>(i);
  }
  // Temporal anomaly: one day's samples play back in a scrambled order; the
  // values stay inside the normal range.
  const size_t scramble_at = (n * 3) / 5;
  std::vector<double> day(24);
  for (size_t k = 0; k < 24; ++k) day[k] = s.records[scramble_at + k].value;
  for (size_t k = 23; k > 0; --k) {
    std::swap(day[k], day[draw_below(rng, k + 1)]);
  }
  for (size_t k = 0; k < 24; ++k) s.records[scramble_at + k].value = day[k];
  s.windows.push_back({ts_at(scramble_at), ts_at(scramble_at + 36)});
  // Spatial anomaly: sustained out-of-range excursion.
  const size_t surge_at = (n * 17) / 20;
  for (size_t k = 0; k < 30 && surge_at + k < n; ++k) {
    s.records[surge_at + k].value += 25.0;
  }
  s.windows.push_back({ts_at(surge_at), ts_at(surge_at + 42)});
  return s;
}

LabeledStream make_double_spike(uint64_t seed, size_t n) {
  if (n == 0) n = 4000;
  LabeledStream s;
  s.name = "double_spike";
  s.records = make_series(n);
  std::mt19937_64 rng(mix64(seed ^ 0x73706b32ULL));
  for (size_t i = 0; i < n; ++i) s.records[i].value = 10.0;
  // Recurring single spikes are normal for this stream: two records wide,
  // a few hundred records apart.
  const size_t double_at = (n * 7) / 10;
  std::vector<size_t> spike_starts;
  for (size_t i = 140; i + 8 < n; i += 140 + draw_below(rng, 40)) {
    if (i + 8 > double_at && i < double_at + 8) continue;
    spike_starts.push_back(i);
  }
  for (size_t start : spike_starts) {
    s.records[start].value = 50.0;
    s.records[start + 1].value = 50.0;
  }
  // The labeled anomaly: two spikes back to back.
  for (size_t k = 0; k < 4; ++k) s.records[double_at + k].value = 50.0;
  s.windows.push_back({ts_at(double_at), ts_at(double_at + 24)});
  return s;
}

LabeledStream make_noisy_spikes(uint64_t seed, size_t n) {
  if (n == 0) n = 4000;
  LabeledStream s;
  s.name = "noisy_spikes";
  s.records = make_series(n);
  std::mt19937_64 rng(mix64(seed ^ 0x6e6f6973ULL));
  for (size_t i = 0; i < n; ++i) {
    const bool spike = draw_unit(rng) < 0.02;
    s.records[i].value = spike ? 40.0 + 20.0 * draw_unit(rng) : 10.0;
  }
  return s;
}

LabeledStream make_noise(uint64_t seed, size_t n) {
  if (n == 0) n = 2000;
  LabeledStream s;
  s.name = "noise";
  s.records = make_series(n);
  std::mt19937_64 rng(mix64(seed ^ 0x756e69ULL));
  for (size_t i = 0; i < n; ++i) {
    s.records[i].value = 100.0 * draw_unit(rng);
  }
  return s;
}

}  // namespace

const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names = {
      "cycle",        "level_shift", "temperature",
      "double_spike", "noisy_spikes", "noise"};
  return names;
}

LabeledStream generate_stream(const std::string& generator, uint64_t seed,
                              size_t records) {
  if (generator == "cycle") return make_cycle(seed, records);
  if (generator == "level_shift") return make_level_shift(seed, records);
  if (generator == "temperature") return make_temperature(seed, records);
  if (generator == "double_spike") return make_double_spike(seed, records);
  if (generator == "noisy_spikes") return make_noisy_spikes(seed, records);
  if (generator == "noise") return make_noise(seed, records);
  throw std::invalid_argument("unknown generator: " + generator);
}

}  // namespace streamad
