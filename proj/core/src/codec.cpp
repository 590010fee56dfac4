#include "mbc/codec.hpp"

#include "mbc/error.hpp"

namespace mbc {
namespace {

std::int32_t referenced_index(const Token& t, const Grammar& g) {
  if (t.class_index < 0 || t.class_index >= static_cast<std::int32_t>(g.classes().size()))
    throw Error(ErrorCode::kUnknownClass, "class index " + std::to_string(t.class_index));
  const auto& members = g.pattern_class(t.class_index).members;
  if (t.member < 0 || t.member >= static_cast<std::int32_t>(members.size()))
    throw Error(ErrorCode::kNotAMember, "member " + std::to_string(t.member) + " of class " +
                                            g.pattern_class(t.class_index).name);
  return members[t.member];
}

const Pattern& referenced_pattern(const Token& t, const Grammar& g) {
  return g.pattern(referenced_index(t, g));
}

void emit_tokens(const Node& node, const Grammar& g, std::optional<std::int32_t> context,
                 std::vector<Token>& out) {
  if (!node.is_pattern()) {
    if (auto id = g.find_terminal(node.symbol))
      out.push_back(Token::lit(*id));
    else
      out.push_back(Token::esc(node.symbol));
    return;
  }
  const auto& p = g.pattern(node.pattern);
  if (context && p.class_index != *context)
    throw Error(ErrorCode::kNotAMember, p.name + " does not belong to slot class " +
                                            g.pattern_class(*context).name);
  out.push_back(Token::ref(p.class_index, p.member_index));
  std::size_t slot = 0;
  for (const auto& el : p.body)
    if (el.is_slot()) emit_tokens(node.children.at(slot++), g, el.id, out);
}

// Walks a token stream in pre-order. `on_token` sees each token with its
// context; `on_symbol` receives the spelled terminals.
template <typename OnToken, typename OnSymbol>
void walk_stream(const std::vector<Token>& tokens, const Grammar& g, OnToken&& on_token,
                 OnSymbol&& on_symbol) {
  std::size_t pos = 0;
  // Recursive expansion of one reference whose token sits at tokens[pos-1].
  auto expand = [&](auto& self, const Pattern& p) -> void {
    for (const auto& el : p.body) {
      if (el.is_terminal()) {
        on_symbol(el.name);
        continue;
      }
      if (pos >= tokens.size())
        throw Error(ErrorCode::kTruncatedStream,
                    "slot @" + el.name + " of " + p.name + " has no token");
      const auto& t = tokens[pos++];
      if (t.kind != Token::Kind::kRef || t.class_index != el.id)
        throw Error(ErrorCode::kMalformedStream,
                    "token " + std::to_string(pos - 1) + " is not a reference into @" + el.name);
      on_token(t, TokenContext::kSlot);
      self(self, referenced_pattern(t, g));
    }
  };
  while (pos < tokens.size()) {
    const auto& t = tokens[pos++];
    on_token(t, TokenContext::kTopLevel);
    switch (t.kind) {
      case Token::Kind::kRef:
        expand(expand, referenced_pattern(t, g));
        break;
      case Token::Kind::kLit:
        if (t.terminal < 0 || t.terminal >= static_cast<std::int32_t>(g.alphabet().size()))
          throw Error(ErrorCode::kMalformedStream, "terminal id " + std::to_string(t.terminal));
        on_symbol(g.alphabet()[t.terminal]);
        break;
      case Token::Kind::kEsc:
        if (t.bytes.empty())
          throw Error(ErrorCode::kMalformedStream, "empty escape");
        on_symbol(t.bytes);
        break;
    }
  }
}

}  // namespace

Bits token_cost(const Token& token, const Grammar& grammar, TokenContext context) {
  switch (token.kind) {
    case Token::Kind::kRef: {
      const auto index = referenced_index(token, grammar);
      if (context == TokenContext::kSlot) return reference_cost(grammar, index, token.class_index);
      return reference_cost(grammar, index, std::nullopt);
    }
    case Token::Kind::kLit:
      if (token.terminal < 0 || token.terminal >= static_cast<std::int32_t>(grammar.alphabet().size()))
        throw Error(ErrorCode::kUnknownSymbol, "terminal id " + std::to_string(token.terminal));
      return kTagBits + grammar.terminal_cost(token.terminal);
    case Token::Kind::kEsc:
      return escape_cost(token.bytes.size());
  }
  return 0;
}

std::vector<Token> to_tokens(const Derivation& derivation, const Grammar& grammar) {
  std::vector<Token> out;
  for (const auto& n : derivation.roots) emit_tokens(n, grammar, std::nullopt, out);
  return out;
}

Bits stream_bits(const std::vector<Token>& tokens, const Grammar& grammar) {
  Bits total = 0;
  walk_stream(
      tokens, grammar,
      [&](const Token& t, TokenContext ctx) { total += token_cost(t, grammar, ctx); },
      [](const std::string&) {});
  return total;
}

Message expand_tokens(const std::vector<Token>& tokens, const Grammar& grammar) {
  Message out;
  walk_stream(
      tokens, grammar, [](const Token&, TokenContext) {},
      [&](const std::string& s) { out.symbols.push_back(s); });
  return out;
}

Encoding encode_literal(const Message& message, const Grammar& grammar) {
  Encoding e;
  e.grammar_fingerprint = grammar.fingerprint();
  e.tokens.reserve(message.size());
  for (const auto& s : message.symbols) {
    if (auto id = grammar.find_terminal(s)) {
      e.tokens.push_back(Token::lit(*id));
      e.bit_length += kTagBits + grammar.terminal_cost(*id);
    } else {
      if (s.empty() || s.size() > kMaxEscapeBytes)
        throw Error(ErrorCode::kInvalidName, "symbol cannot be escaped (length " +
                                                 std::to_string(s.size()) + ")");
      e.tokens.push_back(Token::esc(s));
      e.bit_length += escape_cost(s.size());
    }
  }
  return e;
}

Encoding encode(const Message& message, const Grammar& grammar, const SearchParams& params) {
  Encoding literal = encode_literal(message, grammar);
  Encoding derived;
  try {
    const Derivation d = best_derivation(message, grammar, params);
    derived.grammar_fingerprint = grammar.fingerprint();
    derived.tokens = to_tokens(d, grammar);
    derived.bit_length = stream_bits(derived.tokens, grammar);
    if (expand_tokens(derived.tokens, grammar) != message) return literal;
  } catch (const Error&) {
    return literal;
  }
  return derived.bit_length <= literal.bit_length ? derived : literal;
}

Message decode(const Encoding& encoding, const Grammar& grammar) {
  if (encoding.grammar_fingerprint != grammar.fingerprint())
    throw Error(ErrorCode::kFingerprintMismatch,
                "encoding was made for grammar " + to_hex(encoding.grammar_fingerprint) +
                    ", have " + to_hex(grammar.fingerprint()));
  return expand_tokens(encoding.tokens, grammar);
}

}  // namespace mbc
