#include "mbc/grammar.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "mbc/error.hpp"
#include "mbc/grammar_format.hpp"

namespace mbc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidName: return "InvalidName";
    case ErrorCode::kDuplicatePatternName: return "DuplicatePatternName";
    case ErrorCode::kEmptyClassReferenced: return "EmptyClassReferenced";
    case ErrorCode::kEmptyBody: return "EmptyBody";
    case ErrorCode::kInvalidFrequency: return "InvalidFrequency";
    case ErrorCode::kUnknownClass: return "UnknownClass";
    case ErrorCode::kNotAMember: return "NotAMember";
    case ErrorCode::kUnknownSymbol: return "UnknownSymbol";
    case ErrorCode::kNoCover: return "NoCover";
    case ErrorCode::kCoverMismatch: return "CoverMismatch";
    case ErrorCode::kFingerprintMismatch: return "FingerprintMismatch";
    case ErrorCode::kTruncatedStream: return "TruncatedStream";
    case ErrorCode::kTrailingTokens: return "TrailingTokens";
    case ErrorCode::kMalformedStream: return "MalformedStream";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kOffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnsortedInput: return "UnsortedInput";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kProtocolViolation: return "ProtocolViolation";
    case ErrorCode::kChannelClosed: return "ChannelClosed";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(CostMode mode) {
  return mode == CostMode::kUniform ? "UNIFORM" : "FREQUENCY";
}

std::optional<CostMode> parse_cost_mode(std::string_view text) {
  if (text == "UNIFORM") return CostMode::kUniform;
  if (text == "FREQUENCY") return CostMode::kFrequency;
  return std::nullopt;
}

bool is_valid_token(std::string_view name) {
  if (name.empty()) return false;
  for (unsigned char c : name) {
    if (c == ':' || c == '@' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
        c == '\f')
      return false;
  }
  return true;
}

int ceil_log2(std::uint64_t k) {
  int bits = 0;
  while ((std::uint64_t{1} << bits) < k) ++bits;
  return bits;
}

Message make_message(std::string_view text) {
  Message m;
  std::size_t i = 0;
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) m.symbols.emplace_back(text.substr(start, i - start));
  }
  return m;
}

bool Pattern::has_slots() const {
  return std::any_of(body.begin(), body.end(), [](const Element& e) { return e.is_slot(); });
}

Grammar Grammar::build(std::vector<PatternSpec> specs, CostMode mode,
                       std::vector<TerminalSpec> terminals, int max_depth) {
  if (max_depth < 1) throw Error(ErrorCode::kSyntaxError, "max_depth must be positive");

  Grammar g;
  g.mode_ = mode;
  g.max_depth_ = max_depth;

  for (const auto& s : specs) {
    if (!is_valid_token(s.name)) throw Error(ErrorCode::kInvalidName, "pattern name '" + s.name + "'");
    if (!is_valid_token(s.class_name))
      throw Error(ErrorCode::kInvalidName, "class name '" + s.class_name + "'");
    if (s.body.empty()) throw Error(ErrorCode::kEmptyBody, "pattern " + s.name);
    if (s.frequency == 0) throw Error(ErrorCode::kInvalidFrequency, "pattern " + s.name);
    for (const auto& e : s.body) {
      if (!is_valid_token(e.name))
        throw Error(ErrorCode::kInvalidName, "element '" + e.name + "' in pattern " + s.name);
    }
  }

  std::sort(specs.begin(), specs.end(),
            [](const PatternSpec& a, const PatternSpec& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < specs.size(); ++i) {
    if (specs[i].name == specs[i - 1].name)
      throw Error(ErrorCode::kDuplicatePatternName, specs[i].name);
  }

  // Alphabet: declared terminals plus any terminal used in a body.
  std::map<std::string, std::uint64_t> counts;
  for (const auto& t : terminals) {
    if (!is_valid_token(t.name)) throw Error(ErrorCode::kInvalidName, "terminal '" + t.name + "'");
    if (t.count == 0) throw Error(ErrorCode::kInvalidFrequency, "terminal " + t.name);
    if (!counts.emplace(t.name, t.count).second)
      throw Error(ErrorCode::kSyntaxError, "terminal declared twice: " + t.name);
  }
  for (const auto& s : specs) {
    for (const auto& e : s.body) {
      if (e.is_terminal()) counts.emplace(e.name, 1);
    }
  }
  for (auto& [name, count] : counts) {
    g.terminal_index_.emplace(name, static_cast<std::int32_t>(g.alphabet_.size()));
    g.alphabet_.push_back(name);
    g.terminal_counts_.push_back(count);
    g.terminal_total_ += count;
  }

  // Classes, ordered by name; members ordered by pattern name.
  std::map<std::string, std::vector<std::int32_t>> members;
  for (std::size_t i = 0; i < specs.size(); ++i)
    members[specs[i].class_name].push_back(static_cast<std::int32_t>(i));
  for (auto& [name, idx] : members) {
    PatternClass c;
    c.name = name;
    c.members = idx;
    for (auto i : idx) c.mass += specs[i].frequency;
    g.class_mass_total_ += c.mass;
    g.class_index_.emplace(name, static_cast<std::int32_t>(g.classes_.size()));
    g.classes_.push_back(std::move(c));
  }
  if (auto it = g.class_index_.find(std::string(kRootClass)); it != g.class_index_.end())
    g.root_ = it->second;

  g.patterns_.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto& s = specs[i];
    Pattern p;
    p.name = std::move(s.name);
    p.class_name = std::move(s.class_name);
    p.frequency = s.frequency;
    p.body = std::move(s.body);
    for (auto& e : p.body) {
      if (e.is_terminal()) {
        e.id = g.terminal_index_.at(e.name);
      } else {
        auto it = g.class_index_.find(e.name);
        if (it == g.class_index_.end())
          throw Error(ErrorCode::kEmptyClassReferenced,
                      "pattern " + p.name + " references class @" + e.name);
        e.id = it->second;
      }
    }
    p.class_index = g.class_index_.at(p.class_name);
    const auto& cm = g.classes_[p.class_index].members;
    p.member_index = static_cast<std::int32_t>(
        std::find(cm.begin(), cm.end(), static_cast<std::int32_t>(i)) - cm.begin());
    g.pattern_index_.emplace(p.name, static_cast<std::int32_t>(i));
    g.patterns_.push_back(std::move(p));
  }

  g.compute_heights();
  g.fingerprint_ = mbc::fingerprint(g);
  return g;
}

Grammar Grammar::terminals_only(std::vector<TerminalSpec> terminals, CostMode mode,
                                int max_depth) {
  return build({}, mode, std::move(terminals), max_depth);
}

void Grammar::compute_heights() {
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> state(patterns_.size(), 0);
  heights_.assign(patterns_.size(), 1);
  std::function<int(std::int32_t)> visit = [&](std::int32_t p) -> int {
    if (state[p] == 2) return heights_[p];
    if (state[p] == 1) return kUnbounded;
    state[p] = 1;
    int h = 1;
    for (const auto& e : patterns_[p].body) {
      if (!e.is_slot()) continue;
      for (auto m : classes_[e.id].members) {
        int sub = visit(m);
        h = std::max(h, sub >= kUnbounded ? kUnbounded : sub + 1);
      }
    }
    state[p] = 2;
    heights_[p] = h;
    return h;
  };
  for (std::size_t p = 0; p < patterns_.size(); ++p) visit(static_cast<std::int32_t>(p));
  // A pattern that only reached a cycle after its first visit finished may
  // carry a finite height that is too low; iterate to a fixpoint.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t p = 0; p < patterns_.size(); ++p) {
      int h = 1;
      for (const auto& e : patterns_[p].body) {
        if (!e.is_slot()) continue;
        for (auto m : classes_[e.id].members)
          h = std::max(h, heights_[m] >= kUnbounded ? kUnbounded : heights_[m] + 1);
      }
      h = std::min(h, kUnbounded);
      if (h > heights_[p]) {
        heights_[p] = h;
        changed = true;
      }
    }
  }
}

std::optional<std::int32_t> Grammar::find_pattern(std::string_view name) const {
  auto it = pattern_index_.find(std::string(name));
  if (it == pattern_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int32_t> Grammar::find_class(std::string_view name) const {
  auto it = class_index_.find(std::string(name));
  if (it == class_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int32_t> Grammar::find_terminal(std::string_view name) const {
  auto it = terminal_index_.find(std::string(name));
  if (it == terminal_index_.end()) return std::nullopt;
  return it->second;
}

Bits Grammar::choice_cost(std::string_view class_name, std::string_view chosen_member) const {
  auto c = find_class(class_name);
  if (!c) throw Error(ErrorCode::kUnknownClass, std::string(class_name));
  auto p = find_pattern(chosen_member);
  if (!p || patterns_[*p].class_index != *c)
    throw Error(ErrorCode::kNotAMember,
                std::string(chosen_member) + " in class " + std::string(class_name));
  return choice_cost(*c, *p);
}

Bits Grammar::choice_cost(std::int32_t class_index, std::int32_t pattern_index) const {
  const auto& c = classes_[class_index];
  if (mode_ == CostMode::kUniform) return ceil_log2(c.members.size());
  const auto f = patterns_[pattern_index].frequency;
  if (f == c.mass) return 0.0;
  return -std::log2(static_cast<double>(f) / static_cast<double>(c.mass));
}

Bits Grammar::class_select_cost(std::int32_t class_index) const {
  if (mode_ == CostMode::kUniform) return ceil_log2(classes_.size());
  const auto m = classes_[class_index].mass;
  if (m == class_mass_total_) return 0.0;
  return -std::log2(static_cast<double>(m) / static_cast<double>(class_mass_total_));
}

Bits Grammar::terminal_cost(std::int32_t terminal_id) const {
  if (mode_ == CostMode::kUniform) return ceil_log2(alphabet_.size());
  const auto c = terminal_counts_[terminal_id];
  if (c == terminal_total_) return 0.0;
  return -std::log2(static_cast<double>(c) / static_cast<double>(terminal_total_));
}

Bits Grammar::class_name_cost() const {
  if (mode_ == CostMode::kUniform) return ceil_log2(classes_.size());
  return classes_.size() <= 1 ? 0.0 : std::log2(static_cast<double>(classes_.size()));
}

std::vector<std::string> Grammar::validation_warnings() const {
  std::vector<std::string> warnings;
  if (!root_) return warnings;
  std::vector<bool> seen(patterns_.size(), false);
  std::vector<std::int32_t> stack(classes_[*root_].members.begin(),
                                  classes_[*root_].members.end());
  while (!stack.empty()) {
    auto p = stack.back();
    stack.pop_back();
    if (seen[p]) continue;
    seen[p] = true;
    for (const auto& e : patterns_[p].body) {
      if (e.is_slot())
        for (auto m : classes_[e.id].members) stack.push_back(m);
    }
  }
  for (std::size_t p = 0; p < patterns_.size(); ++p) {
    if (!seen[p]) warnings.push_back("pattern " + patterns_[p].name + " is unreachable from ROOT");
  }
  return warnings;
}

std::vector<PatternSpec> Grammar::pattern_specs() const {
  std::vector<PatternSpec> out;
  out.reserve(patterns_.size());
  for (const auto& p : patterns_) {
    PatternSpec s{p.name, p.class_name, p.body, p.frequency};
    for (auto& e : s.body) e.id = -1;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<TerminalSpec> Grammar::terminal_specs() const {
  std::vector<TerminalSpec> out;
  for (std::size_t i = 0; i < alphabet_.size(); ++i)
    out.push_back({alphabet_[i], terminal_counts_[i]});
  return out;
}

Bits raw_bits(const Message& message, const Grammar& grammar) {
  Bits total = 0;
  for (const auto& s : message.symbols) {
    auto id = grammar.find_terminal(s);
    if (!id) throw Error(ErrorCode::kUnknownSymbol, s);
    total += grammar.terminal_cost(*id);
  }
  return total;
}

Digest fingerprint(const Grammar& grammar) {
  const std::string text = serialize_grammar(grammar);
  Digest d{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), d.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != d.size())
    throw Error(ErrorCode::kIo, "sha256 failed");
  return d;
}

std::string to_hex(const Digest& digest) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

}  // namespace mbc
