#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace streamad {

/// One stream element: a UTC instant (epoch seconds) and a finite value.
struct Record {
  int64_t timestamp = 0;
  double value = 0.0;

  bool operator==(const Record&) const = default;
};

/// Parses an ISO-8601 instant ("2014-04-01 00:00:00" or
/// "2014-04-01T00:00:00Z"; fractional seconds are accepted and truncated).
/// Returns nullopt on malformed input.
std::optional<int64_t> parse_timestamp(const std::string& text);

/// Canonical "YYYY-MM-DD HH:MM:SS" rendering of an epoch instant.
std::string format_timestamp(int64_t epoch_seconds);

}  // namespace streamad
