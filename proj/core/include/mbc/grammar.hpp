#pragma once

// Symbols, patterns, grammars and the bit-cost model shared by every other
// component. A Grammar is immutable once built and safe to share between
// threads.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mbc {

inline constexpr std::string_view kRootClass = "ROOT";
inline constexpr int kDefaultMaxDepth = 8;

/// Bit quantities are fractional under FREQUENCY costs; they are rounded up
/// only where something is written to a file or a frame.
using Bits = double;

using Digest = std::array<std::uint8_t, 32>;

enum class CostMode { kUniform, kFrequency };

std::string_view to_string(CostMode mode);
std::optional<CostMode> parse_cost_mode(std::string_view text);

/// A symbol name is a non-empty token without whitespace, ':' or '@'.
bool is_valid_token(std::string_view name);

/// ceil(log2 k), with 0 for k <= 1.
int ceil_log2(std::uint64_t k);

/// A message D: a sequence of terminal symbol names. Symbols outside a
/// grammar's alphabet are legal and travel as escapes.
struct Message {
  std::vector<std::string> symbols;

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  friend bool operator==(const Message&, const Message&) = default;
};

Message make_message(std::string_view whitespace_separated);

struct Element {
  enum class Kind : std::uint8_t { kTerminal, kSlot };

  Kind kind = Kind::kTerminal;
  std::string name;  // terminal symbol or class name
  // Resolved by Grammar: terminal id or class index. -1 before resolution.
  std::int32_t id = -1;

  static Element terminal(std::string name) { return {Kind::kTerminal, std::move(name), -1}; }
  static Element slot(std::string class_name) { return {Kind::kSlot, std::move(class_name), -1}; }

  bool is_terminal() const { return kind == Kind::kTerminal; }
  bool is_slot() const { return kind == Kind::kSlot; }

  friend bool operator==(const Element& a, const Element& b) {
    return a.kind == b.kind && a.name == b.name;
  }
};

/// Input description of one pattern; see Grammar::build.
struct PatternSpec {
  std::string name;
  std::string class_name;
  std::vector<Element> body;
  std::uint64_t frequency = 1;
};

/// Declares a terminal (with an occurrence count) independent of any pattern
/// body. Terminals that occur only in bodies default to a count of 1.
struct TerminalSpec {
  std::string name;
  std::uint64_t count = 1;
};

struct Pattern {
  std::string name;
  std::string class_name;
  std::vector<Element> body;
  std::uint64_t frequency = 1;
  std::int32_t class_index = -1;
  std::int32_t member_index = -1;  // position inside its class, ordered by name

  bool has_slots() const;
};

struct PatternClass {
  std::string name;
  std::vector<std::int32_t> members;  // pattern indices, ordered by pattern name
  std::uint64_t mass = 0;             // sum of member frequencies
};

class Grammar {
 public:
  /// Validates and indexes a grammar. Throws Error with kInvalidName,
  /// kDuplicatePatternName, kEmptyBody, kEmptyClassReferenced or
  /// kInvalidFrequency.
  static Grammar build(std::vector<PatternSpec> patterns, CostMode mode,
                       std::vector<TerminalSpec> terminals = {},
                       int max_depth = kDefaultMaxDepth);

  /// Grammar with no patterns over the given terminals.
  static Grammar terminals_only(std::vector<TerminalSpec> terminals, CostMode mode,
                                int max_depth = kDefaultMaxDepth);

  CostMode cost_mode() const { return mode_; }
  int max_depth() const { return max_depth_; }
  const Digest& fingerprint() const { return fingerprint_; }

  std::span<const Pattern> patterns() const { return patterns_; }
  std::span<const PatternClass> classes() const { return classes_; }
  const Pattern& pattern(std::int32_t index) const { return patterns_[index]; }
  const PatternClass& pattern_class(std::int32_t index) const { return classes_[index]; }

  std::optional<std::int32_t> find_pattern(std::string_view name) const;
  std::optional<std::int32_t> find_class(std::string_view name) const;
  std::optional<std::int32_t> root_class() const { return root_; }

  /// Terminals sorted byte-wise; the id of a terminal is its position.
  std::span<const std::string> alphabet() const { return alphabet_; }
  std::span<const std::uint64_t> terminal_counts() const { return terminal_counts_; }
  std::optional<std::int32_t> find_terminal(std::string_view name) const;

  /// Cost of choosing `chosen_member` within `class_name`. Throws kUnknownClass
  /// or kNotAMember.
  Bits choice_cost(std::string_view class_name, std::string_view chosen_member) const;
  Bits choice_cost(std::int32_t class_index, std::int32_t pattern_index) const;

  /// Cost of naming one class out of the full class table; used by top-level
  /// references that leave the ROOT context.
  Bits class_select_cost(std::int32_t class_index) const;

  /// Cost of a terminal drawn from the alphabet.
  Bits terminal_cost(std::int32_t terminal_id) const;

  /// Cost of naming a class inside a pattern body (uniform over class names).
  Bits class_name_cost() const;

  /// Height of the deepest derivation rooted at a pattern; kUnbounded when the
  /// class graph reachable from it is cyclic.
  static constexpr int kUnbounded = 1 << 20;
  int height(std::int32_t pattern_index) const { return heights_[pattern_index]; }

  /// Patterns not reachable from ROOT (when a ROOT class exists).
  std::vector<std::string> validation_warnings() const;

  /// Specs that rebuild this grammar exactly; terminals list every terminal.
  std::vector<PatternSpec> pattern_specs() const;
  std::vector<TerminalSpec> terminal_specs() const;

  friend bool operator==(const Grammar& a, const Grammar& b) {
    return a.fingerprint_ == b.fingerprint_;
  }

 private:
  Grammar() = default;
  void compute_heights();

  CostMode mode_ = CostMode::kUniform;
  int max_depth_ = kDefaultMaxDepth;
  std::vector<Pattern> patterns_;
  std::vector<PatternClass> classes_;
  std::unordered_map<std::string, std::int32_t> pattern_index_;
  std::unordered_map<std::string, std::int32_t> class_index_;
  std::vector<std::string> alphabet_;
  std::vector<std::uint64_t> terminal_counts_;
  std::uint64_t terminal_total_ = 0;
  std::uint64_t class_mass_total_ = 0;
  std::unordered_map<std::string, std::int32_t> terminal_index_;
  std::optional<std::int32_t> root_;
  std::vector<int> heights_;
  Digest fingerprint_{};
};

/// B_N: the raw size of a message under the grammar's alphabet. Throws
/// kUnknownSymbol for symbols outside the alphabet.
Bits raw_bits(const Message& message, const Grammar& grammar);

/// Digest of the canonical text serialization.
Digest fingerprint(const Grammar& grammar);

std::string to_hex(const Digest& digest);

}  // namespace mbc
