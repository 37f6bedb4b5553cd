#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "streamad/bench.hpp"
#include "streamad/record.hpp"

namespace streamad {

/// A generated stream plus its ground-truth anomaly windows.
struct LabeledStream {
  std::string name;
  std::vector<Record> records;
  std::vector<AnomalyWindow> windows;
};

/// Deterministic synthetic streams (5-minute cadence) for tests and bench
/// corpora:
///   cycle        clean periodic wave, no anomalies
///   level_shift  periodic wave whose baseline jumps mid-stream
///   temperature  daily wave with slow drift, one re-ordered (temporal)
///                day and one sustained out-of-range excursion
///   double_spike flat baseline with recurring single spikes; one pair of
///                consecutive spikes is the labeled (temporal) anomaly
///   noisy_spikes flat baseline with frequent random spikes, unlabeled
///   noise        uniform random values, unlabeled
/// records == 0 selects each generator's default length.
LabeledStream generate_stream(const std::string& generator, uint64_t seed,
                              size_t records = 0);

const std::vector<std::string>& generator_names();

}  // namespace streamad
