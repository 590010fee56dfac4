#pragma once

// The "ordinary compression" comparator: greedy LZSS whose output bundles the
// implicit dictionary (Gx) with the match/literal stream (Ex).
//
// SPB1 blob: "SPB1" | u64 LE plaintext length | bitstream, MSB-first:
//   0 + 8-bit literal
//   1 + 15-bit (distance - 1) + 8-bit (length - 3)
// zero-padded to a byte boundary.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mbc/grammar.hpp"

namespace mbc::lz {

inline constexpr std::size_t kWindow = 32768;
inline constexpr std::size_t kMinMatch = 3;
inline constexpr std::size_t kMaxMatch = 258;
inline constexpr std::size_t kHeaderBytes = 12;

struct LzToken {
  bool is_match = false;
  std::uint8_t literal = 0;
  std::uint32_t distance = 0;  // 1-based: 1 = previous byte
  std::uint32_t length = 0;

  friend bool operator==(const LzToken&, const LzToken&) = default;
};

/// Greedy longest-match parse; among equally long matches the nearest wins.
std::vector<LzToken> parse(std::span<const std::uint8_t> data);

std::vector<std::uint8_t> compress(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> compress(std::string_view text);

/// Throws kBadMagic, kTruncatedStream, kOffsetOutOfRange, kMalformedStream
/// (a match running past the stated length) or kTrailingTokens.
std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> blob);

}  // namespace mbc::lz

namespace mbc {

/// Tokens joined by single spaces and newline-terminated; the empty message
/// serializes to the empty string.
std::string canonical_text(const Message& message);

/// 8 x compressed size of the message's canonical text.
Bits baseline_bits(const Message& message);

}  // namespace mbc
