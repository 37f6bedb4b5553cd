#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace streamad {

/// Fixed-width sparse binary vector, stored as a sorted list of active bit
/// indices. Immutable after construction; equality is (width, active set).
class Sdr {
 public:
  Sdr() = default;

  /// Empty code of the given width.
  explicit Sdr(uint32_t width) : width_(width) {}

  /// Indices may arrive in any order; they are sorted. Throws
  /// std::invalid_argument on duplicates or indices >= width.
  Sdr(uint32_t width, std::vector<uint32_t> active);

  uint32_t width() const { return width_; }
  const std::vector<uint32_t>& active() const { return active_; }
  size_t size() const { return active_.size(); }
  bool empty() const { return active_.empty(); }

  bool contains(uint32_t bit) const;

  bool operator==(const Sdr& other) const = default;

  /// Debug form "width:[i0,i1,...]", used in golden-file tests.
  std::string to_debug_string() const;

 private:
  uint32_t width_ = 0;
  std::vector<uint32_t> active_;
};

/// |a.active ∩ b.active|. Symmetric. Throws std::invalid_argument on
/// width mismatch (incompatible codes).
size_t overlap(const Sdr& a, const Sdr& b);

/// Bitwise union of all codes. Throws on an empty list or width mismatch.
Sdr union_of(std::span<const Sdr> codes);

}  // namespace streamad
