#include "streamad/sdr.hpp"

#include <algorithm>
#include <stdexcept>

namespace streamad {

Sdr::Sdr(uint32_t width, std::vector<uint32_t> active)
    : width_(width), active_(std::move(active)) {
  std::sort(active_.begin(), active_.end());
  for (size_t i = 0; i < active_.size(); ++i) {
    if (active_[i] >= width_) {
      throw std::invalid_argument("Sdr: bit index out of range");
    }
    if (i > 0 && active_[i] == active_[i - 1]) {
      throw std::invalid_argument("Sdr: duplicate bit index");
    }
  }
}

bool Sdr::contains(uint32_t bit) const {
  return std::binary_search(active_.begin(), active_.end(), bit);
}

std::string Sdr::to_debug_string() const {
  std::string out = std::to_string(width_) + ":[";
  for (size_t i = 0; i < active_.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(active_[i]);
  }
  out += ']';
  return out;
}

size_t overlap(const Sdr& a, const Sdr& b) {
  if (a.width() != b.width()) {
    throw std::invalid_argument("overlap: incompatible code widths");
  }
  const auto& xs = a.active();
  const auto& ys = b.active();
  size_t n = 0, i = 0, j = 0;
  while (i < xs.size() && j < ys.size()) {
    if (xs[i] < ys[j]) {
      ++i;
    } else if (ys[j] < xs[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

Sdr union_of(std::span<const Sdr> codes) {
  if (codes.empty()) {
    throw std::invalid_argument("union_of: empty code list");
  }
  const uint32_t width = codes.front().width();
  std::vector<uint32_t> merged;
  for (const Sdr& c : codes) {
    if (c.width() != width) {
      throw std::invalid_argument("union_of: incompatible code widths");
    }
    merged.insert(merged.end(), c.active().begin(), c.active().end());
  }
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  return Sdr(width, std::move(merged));
}

}  // namespace streamad
