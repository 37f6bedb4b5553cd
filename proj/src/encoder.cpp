#include "streamad/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "streamad/hashing.hpp"

namespace streamad {
namespace {

// Picks active_bits distinct bits for the hash inputs first..first+w-1,
// probing hash(seed, input, attempt) until a free bit turns up.
void fill_bucket_bits(uint64_t seed, int64_t first_input, uint32_t active_bits,
                      uint32_t width, uint32_t offset,
                      std::vector<uint32_t>& out) {
  std::vector<uint32_t> chosen;
  chosen.reserve(active_bits);
  for (uint32_t j = 0; j < active_bits; ++j) {
    const auto input = static_cast<uint64_t>(first_input + j);
    uint64_t attempt = 0;
    uint32_t bit;
    do {
      bit = static_cast<uint32_t>(hash_combine(seed, input, attempt) % width);
      ++attempt;
    } while (std::find(chosen.begin(), chosen.end(), bit) != chosen.end());
    chosen.push_back(bit);
  }
  for (uint32_t bit : chosen) out.push_back(bit + offset);
}

int64_t bucket_of(double value, double resolution) {
  double b = std::floor(value / resolution);
  // Quantization saturates far outside any realistic metric range.
  b = std::clamp(b, -9.0e15, 9.0e15);
  return static_cast<int64_t>(b);
}

}  // namespace

void ScalarEncoderConfig::validate() const {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("scalar encoder: resolution must be > 0");
  }
  if (active_bits == 0 || active_bits >= width) {
    throw std::invalid_argument(
        "scalar encoder: need 0 < active_bits < width");
  }
}

void TimeEncoderConfig::validate() const {
  if (time_of_day) {
    if (tod_active_bits == 0 || tod_active_bits >= tod_width ||
        tod_bucket_seconds == 0) {
      throw std::invalid_argument("time encoder: bad time-of-day subfield");
    }
  }
  if (day_of_week) {
    if (dow_active_bits == 0 || dow_active_bits >= dow_width) {
      throw std::invalid_argument("time encoder: bad day-of-week subfield");
    }
  }
}

Sdr encode_scalar(const ScalarEncoderConfig& cfg, double value) {
  cfg.validate();
  if (!std::isfinite(value)) {
    throw std::invalid_argument("encode_scalar: non-finite value");
  }
  std::vector<uint32_t> bits;
  bits.reserve(cfg.active_bits);
  fill_bucket_bits(cfg.seed, bucket_of(value, cfg.resolution), cfg.active_bits,
                   cfg.width, 0, bits);
  return Sdr(cfg.width, std::move(bits));
}

Sdr RecordEncoder::encode(int64_t timestamp_utc, double value) const {
  scalar.validate();
  time.validate();
  if (!std::isfinite(value)) {
    throw std::invalid_argument("encode: non-finite value");
  }
  std::vector<uint32_t> bits;
  bits.reserve(scalar.active_bits + time.tod_active_bits +
               time.dow_active_bits);
  fill_bucket_bits(scalar.seed, bucket_of(value, scalar.resolution),
                   scalar.active_bits, scalar.width, 0, bits);
  uint32_t offset = scalar.width;
  // Timestamps before the epoch do not occur in practice; keep the civil
  // arithmetic simple by flooring.
  const int64_t day_seconds = 86400;
  const int64_t days = timestamp_utc >= 0
                           ? timestamp_utc / day_seconds
                           : (timestamp_utc - day_seconds + 1) / day_seconds;
  if (time.time_of_day) {
    const int64_t second_of_day = timestamp_utc - days * day_seconds;
    const int64_t bucket = second_of_day / time.tod_bucket_seconds;
    fill_bucket_bits(scalar.seed ^ 0x746f64ULL, bucket, time.tod_active_bits,
                     time.tod_width, offset, bits);
    offset += time.tod_width;
  }
  if (time.day_of_week) {
    const int64_t weekday = ((days % 7) + 7 + 4) % 7;  // epoch was a Thursday
    // Stride by active_bits so different weekdays share no hash inputs.
    fill_bucket_bits(scalar.seed ^ 0x646f77ULL,
                     weekday * int64_t{time.dow_active_bits},
                     time.dow_active_bits, time.dow_width, offset, bits);
  }
  return Sdr(total_width(), std::move(bits));
}

}  // namespace streamad
