#pragma once

// The code E: a pre-order token stream over a derivation, plus the
// fingerprint of the grammar it was produced against.

#include <cstdint>
#include <string>
#include <vector>

#include "mbc/derivation.hpp"
#include "mbc/grammar.hpp"

namespace mbc {

struct Token {
  enum class Kind : std::uint8_t { kRef, kLit, kEsc };

  Kind kind = Kind::kLit;
  // kRef: the class context and the member's position inside it. Nested
  // references always use the enclosing slot's class. A top-level reference
  // uses ROOT when the pattern belongs to ROOT and otherwise names the
  // pattern's own class, paying for the class choice.
  std::int32_t class_index = -1;
  std::int32_t member = -1;
  std::int32_t terminal = -1;  // kLit
  std::string bytes;           // kEsc

  static Token ref(std::int32_t class_index, std::int32_t member) {
    return {Kind::kRef, class_index, member, -1, {}};
  }
  static Token lit(std::int32_t terminal) { return {Kind::kLit, -1, -1, terminal, {}}; }
  static Token esc(std::string bytes) { return {Kind::kEsc, -1, -1, -1, std::move(bytes)}; }

  friend bool operator==(const Token&, const Token&) = default;
};

enum class TokenContext { kTopLevel, kSlot };

struct Encoding {
  Digest grammar_fingerprint{};
  std::vector<Token> tokens;
  Bits bit_length = 0;

  friend bool operator==(const Encoding&, const Encoding&) = default;
};

/// Throws kNotAMember when the member index is outside its class, and
/// kUnknownSymbol for a LIT whose id is outside the alphabet.
Bits token_cost(const Token& token, const Grammar& grammar,
                TokenContext context = TokenContext::kSlot);

/// Pre-order token stream for a derivation.
std::vector<Token> to_tokens(const Derivation& derivation, const Grammar& grammar);

/// Sum of token costs, resolving the context of each token by walking the
/// stream.
Bits stream_bits(const std::vector<Token>& tokens, const Grammar& grammar);

/// Best derivation, serialized and self-verified. Falls back to the literal
/// encoding whenever the derived stream fails to decode back to `message`.
Encoding encode(const Message& message, const Grammar& grammar, const SearchParams& params = {});

/// LIT tokens for alphabet symbols, ESC tokens for everything else.
Encoding encode_literal(const Message& message, const Grammar& grammar);

/// Deterministic pre-order expansion. Throws kFingerprintMismatch,
/// kTruncatedStream or kMalformedStream.
Message decode(const Encoding& encoding, const Grammar& grammar);

/// Decodes without the fingerprint gate; used by the encoder's self-check.
Message expand_tokens(const std::vector<Token>& tokens, const Grammar& grammar);

}  // namespace mbc
