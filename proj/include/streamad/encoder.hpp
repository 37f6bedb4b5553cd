#pragma once

#include <cstdint>
#include <optional>

#include "streamad/sdr.hpp"

namespace streamad {

/// Randomly-hashed bucket encoder for unbounded scalar ranges. A value is
/// quantized to bucket b = floor(value / resolution); the code's active bits
/// are hash(seed, b + j) mod width for j = 0..active_bits-1, with
/// deterministic probing on collisions so exactly active_bits distinct bits
/// result. Buckets b and b+1 therefore share all but one hash input and
/// their codes overlap in ~active_bits-1 positions.
struct ScalarEncoderConfig {
  double resolution = 1.0;  // value units per bucket, > 0
  uint32_t active_bits = 40;
  uint32_t width = 2048;
  uint64_t seed = 1;

  void validate() const;
};

Sdr encode_scalar(const ScalarEncoderConfig& cfg, double value);

/// Optional timestamp subfields appended after the scalar code. Day-of-week
/// buckets are strided so distinct weekdays share no hash inputs; time-of-day
/// buckets are consecutive so nearby times yield overlapping codes.
struct TimeEncoderConfig {
  bool time_of_day = false;
  uint32_t tod_active_bits = 21;
  uint32_t tod_width = 512;
  uint32_t tod_bucket_seconds = 1800;
  bool day_of_week = false;
  uint32_t dow_active_bits = 11;
  uint32_t dow_width = 256;

  void validate() const;
  uint32_t total_width() const {
    return (time_of_day ? tod_width : 0) + (day_of_week ? dow_width : 0);
  }
};

struct RecordEncoder {
  ScalarEncoderConfig scalar;
  TimeEncoderConfig time;

  uint32_t total_width() const { return scalar.width + time.total_width(); }

  /// Concatenation of the subfield codes, scalar first; subfield bit indices
  /// are offset by the widths of the preceding subfields.
  Sdr encode(int64_t timestamp_utc, double value) const;
};

}  // namespace streamad
