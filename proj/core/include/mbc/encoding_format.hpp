#pragma once

// SPE1 binary encoding file.
//
//   "SPE1" | 32-byte grammar fingerprint | u64 LE token count | packed tokens
//
// Tokens are packed MSB-first, each as a 2-bit kind followed by fields whose
// widths follow from the grammar and the decode position:
//
//   0 REF   member index, ceil(log2 |class|) bits. The class is ROOT at top
//           level and the enclosing slot's class otherwise.
//   1 LIT   terminal id, ceil(log2 |alphabet|) bits.
//   2 ESC   16-bit byte length, then the bytes.
//   3 REFX  top level only: class index, ceil(log2 |classes|) bits, then the
//           member index as for REF.
//
// The stream is zero-padded to a byte boundary.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mbc/codec.hpp"

namespace mbc {

inline constexpr std::size_t kEncodingHeaderBytes = 4 + 32 + 8;

std::vector<std::uint8_t> write_encoding(const Encoding& encoding, const Grammar& grammar);

/// Throws kBadMagic, kTruncatedStream, kFingerprintMismatch, kMalformedStream
/// or kTrailingTokens.
Encoding read_encoding(std::span<const std::uint8_t> bytes, const Grammar& grammar);

/// Reads one encoding from the front of `bytes`, which may hold more after it.
/// Returns the encoding and the number of bytes it occupies.
std::pair<Encoding, std::size_t> read_encoding_prefix(std::span<const std::uint8_t> bytes,
                                                     const Grammar& grammar);

/// Reads only the fingerprint, so a receiver can check it before decoding.
Digest peek_fingerprint(std::span<const std::uint8_t> bytes);

}  // namespace mbc
