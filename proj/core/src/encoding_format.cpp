#include "mbc/encoding_format.hpp"

#include <algorithm>
#include <cstring>

#include "mbc/bit_io.hpp"
#include "mbc/error.hpp"

namespace mbc {
namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'P', 'E', '1'};

enum WireKind : std::uint64_t { kRef = 0, kLit = 1, kEsc = 2, kRefX = 3 };

int member_width(const Grammar& g, std::int32_t c) {
  return ceil_log2(g.pattern_class(c).members.size());
}

void push_slots(const Grammar& g, std::int32_t pattern, std::vector<std::int32_t>& pending) {
  const auto& body = g.pattern(pattern).body;
  for (auto it = body.rbegin(); it != body.rend(); ++it)
    if (it->is_slot()) pending.push_back(it->id);
}

}  // namespace

std::vector<std::uint8_t> write_encoding(const Encoding& encoding, const Grammar& grammar) {
  if (encoding.grammar_fingerprint != grammar.fingerprint())
    throw Error(ErrorCode::kFingerprintMismatch, "encoding does not belong to this grammar");

  std::vector<std::uint8_t> out(kEncodingHeaderBytes - 8);
  std::copy(std::begin(kMagic), std::end(kMagic), out.begin());
  std::copy(encoding.grammar_fingerprint.begin(), encoding.grammar_fingerprint.end(), out.begin() + 4);
  put_u64_le(out, encoding.tokens.size());

  BitWriter bits(out);
  std::vector<std::int32_t> pending;  // slot classes still to be filled
  const int class_width = ceil_log2(grammar.classes().size());
  const int terminal_width = ceil_log2(grammar.alphabet().size());

  for (const auto& t : encoding.tokens) {
    if (!pending.empty()) {
      const auto c = pending.back();
      pending.pop_back();
      if (t.kind != Token::Kind::kRef || t.class_index != c)
        throw Error(ErrorCode::kMalformedStream, "slot token is not a reference into its class");
      const auto& members = grammar.pattern_class(c).members;
      if (t.member < 0 || t.member >= static_cast<std::int32_t>(members.size()))
        throw Error(ErrorCode::kNotAMember, "member index out of range");
      bits.write(kRef, 2);
      bits.write(static_cast<std::uint64_t>(t.member), member_width(grammar, c));
      push_slots(grammar, members[t.member], pending);
      continue;
    }
    switch (t.kind) {
      case Token::Kind::kRef: {
        if (t.class_index < 0 || t.class_index >= static_cast<std::int32_t>(grammar.classes().size()))
          throw Error(ErrorCode::kUnknownClass, "class index out of range");
        const auto& members = grammar.pattern_class(t.class_index).members;
        if (t.member < 0 || t.member >= static_cast<std::int32_t>(members.size()))
          throw Error(ErrorCode::kNotAMember, "member index out of range");
        if (grammar.root_class() && t.class_index == *grammar.root_class()) {
          bits.write(kRef, 2);
        } else {
          bits.write(kRefX, 2);
          bits.write(static_cast<std::uint64_t>(t.class_index), class_width);
        }
        bits.write(static_cast<std::uint64_t>(t.member), member_width(grammar, t.class_index));
        push_slots(grammar, members[t.member], pending);
        break;
      }
      case Token::Kind::kLit:
        if (t.terminal < 0 || t.terminal >= static_cast<std::int32_t>(grammar.alphabet().size()))
          throw Error(ErrorCode::kUnknownSymbol, "terminal id out of range");
        bits.write(kLit, 2);
        bits.write(static_cast<std::uint64_t>(t.terminal), terminal_width);
        break;
      case Token::Kind::kEsc:
        if (t.bytes.empty() || t.bytes.size() > kMaxEscapeBytes)
          throw Error(ErrorCode::kMalformedStream, "escape length out of range");
        bits.write(kEsc, 2);
        bits.write(t.bytes.size(), kEscapeLengthBits);
        for (unsigned char ch : t.bytes) bits.write(ch, 8);
        break;
    }
  }
  if (!pending.empty()) throw Error(ErrorCode::kTruncatedStream, "token stream ends inside a pattern");
  return out;
}

Digest peek_fingerprint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::kTruncatedStream, "missing magic");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin()))
    throw Error(ErrorCode::kBadMagic, "not an SPE1 file");
  if (bytes.size() < 36) throw Error(ErrorCode::kTruncatedStream, "truncated fingerprint");
  Digest d{};
  std::copy_n(bytes.begin() + 4, d.size(), d.begin());
  return d;
}

std::pair<Encoding, std::size_t> read_encoding_prefix(std::span<const std::uint8_t> bytes,
                                                     const Grammar& grammar) {
  Encoding e;
  e.grammar_fingerprint = peek_fingerprint(bytes);
  if (e.grammar_fingerprint != grammar.fingerprint())
    throw Error(ErrorCode::kFingerprintMismatch,
                "file carries grammar " + to_hex(e.grammar_fingerprint));
  if (bytes.size() < kEncodingHeaderBytes) throw Error(ErrorCode::kTruncatedStream, "truncated token count");
  const std::uint64_t count = get_u64_le(bytes.subspan(36, 8));

  BitReader bits(bytes.subspan(kEncodingHeaderBytes));
  std::vector<std::int32_t> pending;
  const int class_width = ceil_log2(grammar.classes().size());
  const int terminal_width = ceil_log2(grammar.alphabet().size());
  const auto n_classes = static_cast<std::uint64_t>(grammar.classes().size());

  auto read_member = [&](std::int32_t c) {
    const auto& members = grammar.pattern_class(c).members;
    const auto m = bits.read(member_width(grammar, c));
    if (m >= members.size()) throw Error(ErrorCode::kMalformedStream, "member index out of range");
    push_slots(grammar, members[m], pending);
    return static_cast<std::int32_t>(m);
  };

  for (std::uint64_t k = 0; k < count; ++k) {
    const auto kind = bits.read(2);
    if (!pending.empty()) {
      const auto c = pending.back();
      pending.pop_back();
      if (kind != kRef) throw Error(ErrorCode::kMalformedStream, "slot token is not a reference");
      const auto m = read_member(c);
      e.tokens.push_back(Token::ref(c, m));
      continue;
    }
    switch (kind) {
      case kRef: {
        if (!grammar.root_class())
          throw Error(ErrorCode::kMalformedStream, "ROOT reference but grammar has no ROOT class");
        const auto c = *grammar.root_class();
        const auto m = read_member(c);
        e.tokens.push_back(Token::ref(c, m));
        break;
      }
      case kRefX: {
        const auto c = bits.read(class_width);
        if (c >= n_classes) throw Error(ErrorCode::kMalformedStream, "class index out of range");
        const auto m = read_member(static_cast<std::int32_t>(c));
        e.tokens.push_back(Token::ref(static_cast<std::int32_t>(c), m));
        break;
      }
      case kLit: {
        const auto t = bits.read(terminal_width);
        if (t >= grammar.alphabet().size())
          throw Error(ErrorCode::kMalformedStream, "terminal id out of range");
        e.tokens.push_back(Token::lit(static_cast<std::int32_t>(t)));
        break;
      }
      case kEsc: {
        const auto len = bits.read(kEscapeLengthBits);
        if (len == 0) throw Error(ErrorCode::kMalformedStream, "empty escape");
        std::string s(len, '\0');
        for (auto& ch : s) ch = static_cast<char>(bits.read(8));
        e.tokens.push_back(Token::esc(std::move(s)));
        break;
      }
    }
  }
  if (!pending.empty()) throw Error(ErrorCode::kTruncatedStream, "token stream ends inside a pattern");
  const auto used = bits.position();
  while (bits.position() % 8 != 0 && bits.remaining() > 0)
    if (bits.read(1) != 0) throw Error(ErrorCode::kTrailingTokens, "nonzero padding after the last token");
  e.bit_length = stream_bits(e.tokens, grammar);
  return {std::move(e), kEncodingHeaderBytes + static_cast<std::size_t>((used + 7) / 8)};
}

Encoding read_encoding(std::span<const std::uint8_t> bytes, const Grammar& grammar) {
  auto [e, consumed] = read_encoding_prefix(bytes, grammar);
  if (consumed != bytes.size()) throw Error(ErrorCode::kTrailingTokens, "data after the last token");
  return std::move(e);
}

}  // namespace mbc
