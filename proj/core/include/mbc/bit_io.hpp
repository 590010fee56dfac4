#pragma once

// MSB-first bit packing shared by the SPE1 and SPB1 formats.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mbc/error.hpp"

namespace mbc {

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void write(std::uint64_t value, int width) {
    for (int b = width - 1; b >= 0; --b) put((value >> b) & 1u);
  }

  void put(unsigned bit) {
    if (fill_ == 0) out_.push_back(0);
    if (bit) out_.back() |= static_cast<std::uint8_t>(0x80u >> fill_);
    fill_ = (fill_ + 1) & 7;
    ++bits_;
  }

  std::uint64_t bits_written() const { return bits_; }

 private:
  std::vector<std::uint8_t>& out_;
  int fill_ = 0;
  std::uint64_t bits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> in) : in_(in) {}

  /// Throws kTruncatedStream when fewer than `width` bits remain.
  std::uint64_t read(int width) {
    if (remaining() < static_cast<std::uint64_t>(width))
      throw Error(ErrorCode::kTruncatedStream,
                  "needed " + std::to_string(width) + " bits at bit offset " + std::to_string(pos_));
    std::uint64_t v = 0;
    for (int k = 0; k < width; ++k) {
      v = (v << 1) | ((in_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u);
      ++pos_;
    }
    return v;
  }

  std::uint64_t remaining() const { return in_.size() * 8 - pos_; }
  std::uint64_t position() const { return pos_; }

  /// True when every bit from the current position to the end is zero and
  /// the position lies in the final byte (or at the end).
  bool only_padding_left() const {
    if (remaining() >= 8) return false;
    for (auto p = pos_; p < in_.size() * 8; ++p)
      if ((in_[p >> 3] >> (7 - (p & 7))) & 1u) return false;
    return true;
  }

 private:
  std::span<const std::uint8_t> in_;
  std::uint64_t pos_ = 0;
};

inline void put_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

inline std::uint64_t get_u64_le(std::span<const std::uint8_t> in) {
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) v = (v << 8) | in[k];
  return v;
}

inline void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int k = 7; k >= 0; --k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

inline std::uint64_t get_u64_be(std::span<const std::uint8_t> in) {
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v = (v << 8) | in[k];
  return v;
}

}  // namespace mbc
