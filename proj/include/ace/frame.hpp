#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ace {

/// Row-major grid of integer codes in [0, 2^bits).
struct Frame {
  int width = 0;
  int height = 0;
  int bits = 8;
  std::vector<std::uint16_t> codes;

  Frame() = default;
  Frame(int w, int h, int b, std::uint16_t fill = 0);

  std::size_t size() const noexcept { return codes.size(); }
  std::uint16_t at(int x, int y) const { return codes[static_cast<std::size_t>(y) * width + x]; }
  std::uint16_t& at(int x, int y) { return codes[static_cast<std::size_t>(y) * width + x]; }

  /// Value at (x, y) with toroidal wrap in both directions.
  std::uint16_t wrapped(int x, int y) const;

  /// Throws InvalidArgument if any code is >= 2^bits or the size is inconsistent.
  void validate() const;

  bool operator==(const Frame&) const = default;
};

/// Cyclic shift: out(x, y) = in(x - dx, y - dy).
Frame cyclic_shift(const Frame& f, int dx, int dy);

}  // namespace ace
