#include "mbc/derivation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "mbc/error.hpp"

namespace mbc {

Bits reference_cost(const Grammar& grammar, std::int32_t pattern,
                    std::optional<std::int32_t> slot_class) {
  const auto& p = grammar.pattern(pattern);
  if (slot_class) return kTagBits + grammar.choice_cost(*slot_class, pattern);
  if (grammar.root_class() && p.class_index == *grammar.root_class())
    return kTagBits + grammar.choice_cost(p.class_index, pattern);
  return kTagBits + grammar.class_select_cost(p.class_index) +
         grammar.choice_cost(p.class_index, pattern);
}

Bits escape_cost(std::size_t byte_length) {
  return kTagBits + kEscapeLengthBits + 8.0 * static_cast<double>(byte_length);
}

Bits literal_cost(const Grammar& grammar, std::string_view symbol) {
  if (auto id = grammar.find_terminal(symbol)) return kTagBits + grammar.terminal_cost(*id);
  return escape_cost(symbol.size());
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int compare_bits(Bits a, Bits b) {
  const double tol = 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  if (std::abs(a - b) <= tol) return 0;
  return a < b ? -1 : 1;
}

struct Fill {
  std::int32_t member;
  std::int32_t begin;
  std::int32_t end;
};

// One way a pattern can match starting at a fixed position. `cost` covers the
// slot contents only; the reference to the pattern itself is charged by the
// caller, which knows the class context.
struct PatternEnd {
  std::int32_t end;
  Bits cost;
  std::uint32_t nodes;
  std::vector<Fill> fills;
};

struct ClassEnd {
  std::int32_t end;
  Bits cost;  // includes the member reference
  std::uint32_t nodes;
  std::int32_t member;
};

struct TopCell {
  Bits cost = kInf;
  std::uint32_t nodes = 0;
  std::int32_t from = -1;
  std::int32_t pattern = -1;  // -1 = literal step
};

class Search {
 public:
  Search(const Message& message, const Grammar& grammar, const SearchParams& params)
      : message_(message), grammar_(grammar), params_(params),
        n_(static_cast<std::int32_t>(message.size())),
        depth_(params.max_depth.value_or(grammar.max_depth())) {
    ids_.reserve(message.size());
    for (const auto& s : message.symbols) ids_.push_back(grammar.find_terminal(s).value_or(-1));

    by_first_terminal_.resize(grammar.alphabet().size());
    for (std::size_t p = 0; p < grammar.patterns().size(); ++p) {
      const auto& first = grammar.pattern(static_cast<std::int32_t>(p)).body.front();
      if (first.is_terminal())
        by_first_terminal_[first.id].push_back(static_cast<std::int32_t>(p));
      else
        slot_first_.push_back(static_cast<std::int32_t>(p));
    }
    class_height_.assign(grammar.classes().size(), 1);
    for (std::size_t c = 0; c < grammar.classes().size(); ++c)
      for (auto m : grammar.pattern_class(static_cast<std::int32_t>(c)).members)
        class_height_[c] = std::max(class_height_[c], grammar.height(m));
  }

  Derivation run() {
    std::vector<TopCell> best(n_ + 1);
    best[0].cost = 0;
    for (std::int32_t i = 0; i < n_; ++i) {
      if (best[i].cost == kInf) continue;
      if (params_.allow_literals) {
        relax_top(best, i + 1, best[i].cost + literal_cost(grammar_, message_.symbols[i]),
                  best[i].nodes + 1, i, -1);
      }
      if (depth_ < 1) continue;
      auto try_pattern = [&](std::int32_t p) {
        const Bits ref = reference_cost(grammar_, p, std::nullopt);
        for (const auto& e : match_pattern(p, i, depth_))
          relax_top(best, e.end, best[i].cost + ref + e.cost, best[i].nodes + e.nodes, i, p);
      };
      if (ids_[i] >= 0)
        for (auto p : by_first_terminal_[ids_[i]]) try_pattern(p);
      for (auto p : slot_first_) try_pattern(p);
    }
    if (best[n_].cost == kInf)
      throw Error(ErrorCode::kNoCover, "no derivation covers the message without literals");

    std::vector<std::int32_t> steps;
    for (std::int32_t j = n_; j > 0; j = best[j].from) steps.push_back(j);
    std::reverse(steps.begin(), steps.end());
    Derivation d;
    for (auto j : steps) {
      const auto& cell = best[j];
      if (cell.pattern < 0)
        d.roots.push_back(Node::literal(message_.symbols[cell.from]));
      else
        d.roots.push_back(build(cell.pattern, cell.from, j, depth_));
    }
    return d;
  }

 private:
  int normalize(std::int32_t p, int r) const { return std::min(r, grammar_.height(p)); }

  std::uint64_t key(std::int32_t item, std::int32_t i, int r) const {
    return (static_cast<std::uint64_t>(item) * static_cast<std::uint64_t>(n_ + 1) +
            static_cast<std::uint64_t>(i)) *
               static_cast<std::uint64_t>(depth_ + 1) +
           static_cast<std::uint64_t>(r);
  }

  struct State {
    Bits cost;
    std::uint32_t nodes;
    std::vector<Fill> fills;
  };

  const std::vector<PatternEnd>& match_pattern(std::int32_t p, std::int32_t i, int r) {
    r = normalize(p, r);
    const auto k = key(p, i, r);
    if (auto it = pattern_memo_.find(k); it != pattern_memo_.end()) return it->second;

    std::map<std::int32_t, State> states;
    states.emplace(i, State{0.0, 1, {}});
    for (const auto& el : grammar_.pattern(p).body) {
      std::map<std::int32_t, State> next;
      for (auto& [pos, st] : states) {
        if (el.is_terminal()) {
          if (pos < n_ && ids_[pos] == el.id) relax_state(next, pos + 1, st, r - 1);
          continue;
        }
        if (r - 1 < 1) continue;
        for (const auto& ce : match_class(el.id, pos, r - 1)) {
          State s{st.cost + ce.cost, st.nodes + ce.nodes, st.fills};
          s.fills.push_back({ce.member, pos, ce.end});
          relax_state(next, ce.end, std::move(s), r - 1);
        }
      }
      prune(next);
      states = std::move(next);
      if (states.empty()) break;
    }

    std::vector<PatternEnd> ends;
    ends.reserve(states.size());
    for (auto& [pos, st] : states) ends.push_back({pos, st.cost, st.nodes, std::move(st.fills)});
    return pattern_memo_.emplace(k, std::move(ends)).first->second;
  }

  const std::vector<ClassEnd>& match_class(std::int32_t c, std::int32_t i, int r) {
    r = std::min(r, class_height_[c]);
    const auto k = key(c, i, r);
    if (auto it = class_memo_.find(k); it != class_memo_.end()) return it->second;

    std::map<std::int32_t, ClassEnd> best;
    for (auto m : grammar_.pattern_class(c).members) {
      const auto& first = grammar_.pattern(m).body.front();
      if (first.is_terminal() && (i >= n_ || ids_[i] != first.id)) continue;
      const Bits ref = reference_cost(grammar_, m, c);
      for (const auto& e : match_pattern(m, i, r)) {
        ClassEnd cand{e.end, ref + e.cost, e.nodes, m};
        auto it = best.find(e.end);
        if (it == best.end()) {
          best.emplace(e.end, cand);
          continue;
        }
        if (better(cand.cost, cand.nodes, it->second.cost, it->second.nodes, [&] {
              return std::pair{subtree_names(m, i, e.end, r),
                               subtree_names(it->second.member, i, e.end, r)};
            }))
          it->second = cand;
      }
    }
    std::vector<ClassEnd> ends;
    ends.reserve(best.size());
    for (auto& [pos, ce] : best) ends.push_back(ce);
    if (params_.beam_width > 0 && ends.size() > params_.beam_width) {
      std::stable_sort(ends.begin(), ends.end(), [](const ClassEnd& a, const ClassEnd& b) {
        return compare_bits(a.cost, b.cost) < 0 ||
               (compare_bits(a.cost, b.cost) == 0 && a.nodes < b.nodes);
      });
      ends.resize(params_.beam_width);
    }
    return class_memo_.emplace(k, std::move(ends)).first->second;
  }

  template <typename NamesFn>
  static bool better(Bits a_cost, std::uint32_t a_nodes, Bits b_cost, std::uint32_t b_nodes,
                     NamesFn&& names) {
    if (int c = compare_bits(a_cost, b_cost); c != 0) return c < 0;
    if (a_nodes != b_nodes) return a_nodes < b_nodes;
    auto [a, b] = names();
    return a < b;
  }

  void relax_state(std::map<std::int32_t, State>& states, std::int32_t pos, State s,
                   int child_r) {
    auto it = states.find(pos);
    if (it == states.end()) {
      states.emplace(pos, std::move(s));
      return;
    }
    if (better(s.cost, s.nodes, it->second.cost, it->second.nodes, [&] {
          return std::pair{fill_names(s.fills, child_r), fill_names(it->second.fills, child_r)};
        }))
      it->second = std::move(s);
  }

  void prune(std::map<std::int32_t, State>& states) const {
    if (params_.beam_width == 0 || states.size() <= params_.beam_width) return;
    std::vector<std::pair<std::int32_t, const State*>> order;
    for (const auto& [pos, st] : states) order.emplace_back(pos, &st);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      int c = compare_bits(a.second->cost, b.second->cost);
      return c < 0 || (c == 0 && a.second->nodes < b.second->nodes);
    });
    std::map<std::int32_t, State> kept;
    for (std::size_t k = 0; k < params_.beam_width; ++k)
      kept.emplace(order[k].first, *order[k].second);
    states = std::move(kept);
  }

  const PatternEnd& find_end(std::int32_t p, std::int32_t i, std::int32_t j, int r) {
    const auto& ends = match_pattern(p, i, r);
    auto it = std::find_if(ends.begin(), ends.end(), [j](const PatternEnd& e) { return e.end == j; });
    return *it;
  }

  void append_names(std::int32_t p, std::int32_t i, std::int32_t j, int r,
                    std::vector<std::string>& out) {
    r = normalize(p, r);
    out.push_back(grammar_.pattern(p).name);
    const auto fills = find_end(p, i, j, r).fills;
    for (const auto& f : fills) append_names(f.member, f.begin, f.end, r - 1, out);
  }

  std::vector<std::string> subtree_names(std::int32_t p, std::int32_t i, std::int32_t j, int r) {
    std::vector<std::string> out;
    append_names(p, i, j, r, out);
    return out;
  }

  std::vector<std::string> fill_names(const std::vector<Fill>& fills, int child_r) {
    std::vector<std::string> out;
    for (const auto& f : fills) append_names(f.member, f.begin, f.end, child_r, out);
    return out;
  }

  std::vector<std::string> prefix_names(const std::vector<TopCell>& best, std::int32_t j) {
    std::vector<std::pair<std::int32_t, std::int32_t>> steps;
    for (; j > 0; j = best[j].from) steps.emplace_back(best[j].from, j);
    std::vector<std::string> out;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      const auto& cell = best[it->second];
      if (cell.pattern >= 0) append_names(cell.pattern, it->first, it->second, depth_, out);
    }
    return out;
  }

  void relax_top(std::vector<TopCell>& best, std::int32_t j, Bits cost, std::uint32_t nodes,
                 std::int32_t from, std::int32_t pattern) {
    auto& cell = best[j];
    if (cell.cost == kInf) {
      cell = {cost, nodes, from, pattern};
      return;
    }
    if (better(cost, nodes, cell.cost, cell.nodes, [&] {
          auto a = prefix_names(best, from);
          if (pattern >= 0) append_names(pattern, from, j, depth_, a);
          return std::pair{std::move(a), prefix_names(best, j)};
        }))
      cell = {cost, nodes, from, pattern};
  }

  Node build(std::int32_t p, std::int32_t i, std::int32_t j, int r) {
    r = normalize(p, r);
    const auto fills = find_end(p, i, j, r).fills;
    Node node = Node::use(p);
    for (const auto& f : fills) node.children.push_back(build(f.member, f.begin, f.end, r - 1));
    return node;
  }

  const Message& message_;
  const Grammar& grammar_;
  const SearchParams& params_;
  std::int32_t n_;
  int depth_;
  std::vector<std::int32_t> ids_;
  std::vector<std::vector<std::int32_t>> by_first_terminal_;
  std::vector<std::int32_t> slot_first_;
  std::vector<int> class_height_;
  std::unordered_map<std::uint64_t, std::vector<PatternEnd>> pattern_memo_;
  std::unordered_map<std::uint64_t, std::vector<ClassEnd>> class_memo_;
};

void spell_node(const Node& node, const Grammar& grammar, Message& out) {
  if (!node.is_pattern()) {
    out.symbols.push_back(node.symbol);
    return;
  }
  std::size_t slot = 0;
  for (const auto& el : grammar.pattern(node.pattern).body) {
    if (el.is_terminal()) {
      out.symbols.push_back(el.name);
    } else {
      if (slot >= node.children.size())
        throw Error(ErrorCode::kCoverMismatch, "pattern use is missing a slot child");
      spell_node(node.children[slot++], grammar, out);
    }
  }
  if (slot != node.children.size())
    throw Error(ErrorCode::kCoverMismatch, "pattern use has extra children");
}

Bits node_bits(const Node& node, const Grammar& grammar, std::optional<std::int32_t> context) {
  if (!node.is_pattern()) return literal_cost(grammar, node.symbol);
  Bits bits = reference_cost(grammar, node.pattern, context);
  std::size_t slot = 0;
  for (const auto& el : grammar.pattern(node.pattern).body)
    if (el.is_slot()) bits += node_bits(node.children.at(slot++), grammar, el.id);
  return bits;
}

std::size_t count_nodes(const Node& node) {
  std::size_t n = 1;
  for (const auto& c : node.children) n += count_nodes(c);
  return n;
}

int node_depth(const Node& node) {
  if (!node.is_pattern()) return 0;
  int d = 0;
  for (const auto& c : node.children) d = std::max(d, node_depth(c));
  return d + 1;
}

void names_of(const Node& node, const Grammar& grammar, std::vector<std::string>& out) {
  if (!node.is_pattern()) return;
  out.push_back(grammar.pattern(node.pattern).name);
  for (const auto& c : node.children) names_of(c, grammar, out);
}

void describe_node(const Node& node, const Grammar& grammar, std::ostringstream& out) {
  if (!node.is_pattern()) {
    out << '\'' << node.symbol << '\'';
    return;
  }
  out << grammar.pattern(node.pattern).name;
  if (node.children.empty()) return;
  out << '(';
  for (std::size_t k = 0; k < node.children.size(); ++k) {
    if (k) out << ',';
    describe_node(node.children[k], grammar, out);
  }
  out << ')';
}

}  // namespace

Derivation best_derivation(const Message& message, const Grammar& grammar,
                           const SearchParams& params) {
  return Search(message, grammar, params).run();
}

Bits encoding_bits(const Derivation& derivation, const Grammar& grammar) {
  Bits total = 0;
  for (const auto& n : derivation.roots) total += node_bits(n, grammar, std::nullopt);
  return total;
}

Message spell(const Derivation& derivation, const Grammar& grammar) {
  Message out;
  for (const auto& n : derivation.roots) spell_node(n, grammar, out);
  return out;
}

AlignmentScore score(const Derivation& derivation, const Message& message,
                     const Grammar& grammar) {
  if (spell(derivation, grammar) != message)
    throw Error(ErrorCode::kCoverMismatch, "derivation does not spell the message");
  AlignmentScore s;
  s.b_new = raw_bits(message, grammar);
  s.b_encoding = encoding_bits(derivation, grammar);
  s.cd = s.b_new - s.b_encoding;
  return s;
}

std::size_t node_count(const Derivation& derivation) {
  std::size_t n = 0;
  for (const auto& r : derivation.roots) n += count_nodes(r);
  return n;
}

int nesting_depth(const Derivation& derivation) {
  int d = 0;
  for (const auto& r : derivation.roots) d = std::max(d, node_depth(r));
  return d;
}

std::vector<std::string> pattern_name_sequence(const Derivation& derivation,
                                               const Grammar& grammar) {
  std::vector<std::string> out;
  for (const auto& r : derivation.roots) names_of(r, grammar, out);
  return out;
}

std::string describe(const Derivation& derivation, const Grammar& grammar) {
  std::ostringstream out;
  for (std::size_t k = 0; k < derivation.roots.size(); ++k) {
    if (k) out << ' ';
    describe_node(derivation.roots[k], grammar, out);
  }
  return out.str();
}

std::string render(const Derivation& derivation, const Message& message, const Grammar& grammar) {
  struct Row {
    std::string label;
    std::vector<char> marks;
  };
  const std::size_t n = message.size();
  std::vector<Row> rows;
  std::vector<char> literal_marks(n, ' ');
  bool any_literal = false;

  // Returns the column after the node's span.
  std::function<std::size_t(const Node&, std::size_t)> walk = [&](const Node& node,
                                                                   std::size_t col) {
    if (!node.is_pattern()) {
      if (col < n) literal_marks[col] = '*';
      any_literal = true;
      return col + 1;
    }
    const std::size_t row = rows.size();
    rows.push_back({grammar.pattern(node.pattern).name, std::vector<char>(n, ' ')});
    std::size_t slot = 0;
    for (const auto& el : grammar.pattern(node.pattern).body) {
      if (el.is_terminal()) {
        if (col < n) rows[row].marks[col] = '|';
        ++col;
      } else {
        const std::size_t start = col;
        col = walk(node.children.at(slot++), col);
        for (std::size_t k = start; k < col && k < n; ++k) rows[row].marks[k] = '.';
      }
    }
    return col;
  };
  std::size_t col = 0;
  for (const auto& r : derivation.roots) col = walk(r, col);

  std::size_t label_width = 3;
  for (const auto& r : rows) label_width = std::max(label_width, r.label.size());
  std::vector<std::size_t> widths(n);
  for (std::size_t k = 0; k < n; ++k) widths[k] = std::max<std::size_t>(1, message.symbols[k].size());

  auto emit = [&](std::ostringstream& out, const std::string& label,
                  const std::function<std::string(std::size_t)>& cell) {
    std::string line = label;
    line.resize(label_width, ' ');
    for (std::size_t k = 0; k < n; ++k) {
      std::string c = cell(k);
      c.resize(widths[k], ' ');
      line += ' ';
      line += c;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  };

  std::ostringstream out;
  emit(out, "NEW", [&](std::size_t k) { return message.symbols[k]; });
  for (const auto& r : rows) emit(out, r.label, [&](std::size_t k) { return std::string(1, r.marks[k]); });
  if (any_literal)
    emit(out, "LIT", [&](std::size_t k) { return std::string(1, literal_marks[k]); });
  return out.str();
}

}  // namespace mbc
