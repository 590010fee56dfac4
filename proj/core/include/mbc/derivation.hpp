#pragma once

// Minimum-cost alignment of a New message against the Old patterns of a
// grammar. The result is a derivation tree whose pre-order token stream is
// the code the codec transmits.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mbc/grammar.hpp"

namespace mbc {

/// Every token carries one tag bit distinguishing references from literals.
inline constexpr Bits kTagBits = 1.0;
/// Escaped symbols carry a 16-bit byte length followed by the raw bytes.
inline constexpr int kEscapeLengthBits = 16;
inline constexpr std::size_t kMaxEscapeBytes = 0xFFFF;

struct Node {
  enum class Kind : std::uint8_t { kPattern, kLiteral };

  Kind kind = Kind::kLiteral;
  std::int32_t pattern = -1;   // grammar pattern index, for kPattern
  std::string symbol;          // for kLiteral
  std::vector<Node> children;  // kPattern: one node per slot, in body order

  static Node literal(std::string symbol) { return {Kind::kLiteral, -1, std::move(symbol), {}}; }
  static Node use(std::int32_t pattern, std::vector<Node> children = {}) {
    return {Kind::kPattern, pattern, {}, std::move(children)};
  }

  bool is_pattern() const { return kind == Kind::kPattern; }
  friend bool operator==(const Node&, const Node&) = default;
};

struct Derivation {
  std::vector<Node> roots;
  friend bool operator==(const Derivation&, const Derivation&) = default;
};

struct SearchParams {
  std::optional<int> max_depth;  // overrides Grammar::max_depth()
  /// 0 = exhaustive and exact. Otherwise every per-start candidate list is cut
  /// to the `beam_width` cheapest entries.
  std::size_t beam_width = 0;
  bool allow_literals = true;
};

struct AlignmentScore {
  Bits b_new = 0;       // raw bits of the message
  Bits b_encoding = 0;  // bits of the derivation's token stream
  Bits cd = 0;          // b_new - b_encoding
};

/// Cost of referencing `pattern` either at top level (slot_class empty) or
/// inside a slot of class `slot_class`.
Bits reference_cost(const Grammar& grammar, std::int32_t pattern,
                    std::optional<std::int32_t> slot_class);

/// Cost of a literal: a LIT token when the symbol is in the alphabet, an ESC
/// token otherwise.
Bits literal_cost(const Grammar& grammar, std::string_view symbol);
Bits escape_cost(std::size_t byte_length);

/// Cheapest derivation of `message`. Ties break on fewer nodes, then on the
/// lexicographically smaller pre-order sequence of pattern names. Throws
/// kNoCover when literals are disabled and no cover exists.
Derivation best_derivation(const Message& message, const Grammar& grammar,
                           const SearchParams& params = {});

/// Sum of token costs of the derivation's pre-order stream.
Bits encoding_bits(const Derivation& derivation, const Grammar& grammar);

/// Throws kCoverMismatch when the derivation does not spell the message.
AlignmentScore score(const Derivation& derivation, const Message& message,
                     const Grammar& grammar);

/// Terminal yield, left to right.
Message spell(const Derivation& derivation, const Grammar& grammar);

std::size_t node_count(const Derivation& derivation);
int nesting_depth(const Derivation& derivation);

/// Pre-order pattern names; literals do not contribute.
std::vector<std::string> pattern_name_sequence(const Derivation& derivation,
                                               const Grammar& grammar);

/// Compact one-line form, e.g. `s1(d1,n1) 'c'`.
std::string describe(const Derivation& derivation, const Grammar& grammar);

/// Row layout: the message, then one row per pattern use marking its own
/// terminals with `|` and slot-supplied columns with `.`, then a `LIT` row
/// marking unmatched columns with `*` when any literal exists.
std::string render(const Derivation& derivation, const Message& message, const Grammar& grammar);

}  // namespace mbc
