#include <doctest.h>

#include <stdexcept>
#include <cmath>

#include <set>
#include <vector>

#include "streamad/encoder.hpp"
#include "streamad/hashing.hpp"
#include "streamad/record.hpp"

using streamad::RecordEncoder;
using streamad::ScalarEncoderConfig;
using streamad::Sdr;
using streamad::TimeEncoderConfig;

namespace {

const ScalarEncoderConfig kCfg{0.1, 40, 2048, 12345};

// Reference construction of one bucket's bit set, following the documented
// hash-with-probing scheme but via a plain set.
std::set<uint32_t> bucket_bits_naive(const ScalarEncoderConfig& cfg,
                                     int64_t bucket, int* collisions) {
  std::set<uint32_t> bits;
  for (uint32_t j = 0; j < cfg.active_bits; ++j) {
    uint64_t attempt = 0;
    uint32_t bit;
    for (;;) {
      bit = static_cast<uint32_t>(
          streamad::hash_combine(cfg.seed, static_cast<uint64_t>(bucket + j),
                                 attempt) %
          cfg.width);
      if (bits.insert(bit).second) break;
      ++attempt;
      if (collisions != nullptr) ++(*collisions);
    }
  }
  return bits;
}

}  // namespace

TEST_CASE("scalar encoding is deterministic and quantized") {
  CHECK(encode_scalar(kCfg, 3.14) == encode_scalar(kCfg, 3.14));
  // same bucket at resolution 0.1
  CHECK(encode_scalar(kCfg, 1.01) == encode_scalar(kCfg, 1.02));
  CHECK(encode_scalar(kCfg, 1.01) != encode_scalar(kCfg, 1.11));
  CHECK(encode_scalar(kCfg, 5.0).size() == kCfg.active_bits);
  CHECK_THROWS_AS(encode_scalar(kCfg, std::nan("")), std::invalid_argument);
  ScalarEncoderConfig bad = kCfg;
  bad.resolution = 0.0;
  CHECK_THROWS_AS(encode_scalar(bad, 1.0), std::invalid_argument);
}

TEST_CASE("encoder matches the naive set construction") {
  for (int64_t b = -3; b < 10; ++b) {
    const Sdr code = encode_scalar(kCfg, (static_cast<double>(b) + 0.5) * 0.1);
    const auto expected = bucket_bits_naive(kCfg, b, nullptr);
    CHECK(std::set<uint32_t>(code.active().begin(), code.active().end()) ==
          expected);
  }
}

TEST_CASE("adjacent buckets overlap in all but the collided inputs") {
  // Buckets b and b+1 feed all but one hash input in common; only collision
  // probing can make a shared input land on different bits.
  size_t worst = kCfg.active_bits;
  for (int64_t b = 0; b <= 100; ++b) {
    int collisions = 0;
    const auto lo = bucket_bits_naive(kCfg, b, &collisions);
    const auto hi = bucket_bits_naive(kCfg, b + 1, &collisions);
    size_t shared = 0;
    for (uint32_t bit : lo) shared += hi.count(bit);
    CHECK(shared >= kCfg.active_bits - 1 - static_cast<size_t>(collisions));
    worst = std::min(worst, shared);
  }
  CHECK(worst >= kCfg.active_bits - 5);
}

TEST_CASE("overlap decays as the value gap grows") {
  const double base = 50.0;
  const Sdr at_base = encode_scalar(kCfg, base);
  size_t prev = kCfg.active_bits;
  for (int gap = 0; gap <= 10; ++gap) {
    const size_t ov =
        overlap(at_base, encode_scalar(kCfg, base + gap * kCfg.resolution));
    CHECK(ov <= prev + 2);  // within collision noise
    CHECK(ov >= kCfg.active_bits - gap - 4);
    CHECK(ov <= kCfg.active_bits - gap + 4);
    prev = ov;
  }
  CHECK(overlap(at_base, encode_scalar(kCfg, base + 10 * kCfg.resolution)) <
        overlap(at_base, encode_scalar(kCfg, base + kCfg.resolution)));
}

TEST_CASE("record encoding composes subfields") {
  const auto ts = *streamad::parse_timestamp("2016-02-01 07:30:00");

  RecordEncoder scalar_only{kCfg, {}};
  CHECK(scalar_only.encode(ts, 3.0) == encode_scalar(kCfg, 3.0));

  TimeEncoderConfig tod;
  tod.time_of_day = true;
  RecordEncoder with_tod{kCfg, tod};
  CHECK(with_tod.total_width() == kCfg.width + tod.tod_width);
  const Sdr a = with_tod.encode(ts, 3.0);
  CHECK(a.size() == kCfg.active_bits + tod.tod_active_bits);
  // scalar bits sit below the subfield offset, time bits above
  size_t below = 0;
  for (uint32_t bit : a.active()) below += bit < kCfg.width ? 1 : 0;
  CHECK(below == kCfg.active_bits);

  // 24h apart, same value, only time-of-day enabled: identical codes
  const auto next_day = *streamad::parse_timestamp("2016-02-02 07:30:00");
  CHECK(with_tod.encode(next_day, 3.0) == a);
  // different time of day differs in the time subfield
  const auto evening = *streamad::parse_timestamp("2016-02-01 19:30:00");
  CHECK(with_tod.encode(evening, 3.0) != a);

  TimeEncoderConfig dow;
  dow.day_of_week = true;
  RecordEncoder with_dow{kCfg, dow};
  const Sdr mon = with_dow.encode(ts, 3.0);  // 2016-02-01 is a Monday
  const Sdr tue =
      with_dow.encode(*streamad::parse_timestamp("2016-02-02 07:30:00"), 3.0);
  const Sdr mon2 =
      with_dow.encode(*streamad::parse_timestamp("2016-02-08 11:00:00"), 3.0);
  CHECK(mon != tue);
  CHECK(mon == mon2);  // same weekday, same value
}
