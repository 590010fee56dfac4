#include "mbc/induction.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "mbc/codec.hpp"
#include "mbc/derivation.hpp"
#include "mbc/error.hpp"

namespace mbc {
namespace {

constexpr Bits kEpsilon = 1e-9;

// Distinct messages with their multiplicities, in a deterministic order.
struct WeightedCorpus {
  std::vector<std::pair<Message, std::uint64_t>> items;

  explicit WeightedCorpus(const Corpus& corpus) {
    std::map<std::vector<std::string>, std::uint64_t> counts;
    for (const auto& m : corpus.messages) ++counts[m.symbols];
    items.reserve(counts.size());
    for (auto& [symbols, n] : counts) items.push_back({Message{symbols}, n});
  }
};

Bits dl_of(const Grammar& g, const WeightedCorpus& corpus) {
  Bits total = grammar_bits(g);
  for (const auto& [m, n] : corpus.items)
    total += static_cast<double>(n) * encode(m, g).bit_length;
  return total;
}

void count_uses(const Node& node, std::uint64_t weight, std::vector<std::uint64_t>& usage) {
  if (!node.is_pattern()) return;
  usage[node.pattern] += weight;
  for (const auto& c : node.children) count_uses(c, weight, usage);
}

std::vector<std::uint64_t> usage_of(const Grammar& g, const WeightedCorpus& corpus) {
  std::vector<std::uint64_t> usage(g.patterns().size(), 0);
  for (const auto& [m, n] : corpus.items) {
    const Derivation d = best_derivation(m, g);
    for (const auto& r : d.roots) count_uses(r, n, usage);
  }
  return usage;
}

// Rebuilds the grammar with pattern frequencies set to observed use counts
// (at least 1). Under UNIFORM costs frequencies do not affect coding but are
// still recorded.
Grammar refit(const Grammar& g, const WeightedCorpus& corpus) {
  const auto usage = usage_of(g, corpus);
  auto specs = g.pattern_specs();
  for (std::size_t i = 0; i < specs.size(); ++i) specs[i].frequency = std::max<std::uint64_t>(1, usage[i]);
  return Grammar::build(std::move(specs), g.cost_mode(), g.terminal_specs(), g.max_depth());
}

std::string element_text(const Element& e) { return e.is_slot() ? "@" + e.name : e.name; }

std::string body_text(const std::vector<Element>& body) {
  std::string out;
  for (std::size_t k = 0; k < body.size(); ++k) {
    if (k) out += ' ';
    out += element_text(body[k]);
  }
  return out;
}

std::string fresh_name(const std::set<std::string>& taken, const std::string& prefix) {
  for (std::size_t n = 1;; ++n) {
    std::string name = prefix + std::to_string(n);
    if (!taken.count(name)) return name;
  }
}

std::set<std::string> taken_names(const std::vector<PatternSpec>& specs) {
  std::set<std::string> out;
  for (const auto& s : specs) {
    out.insert(s.name);
    out.insert(s.class_name);
  }
  return out;
}

// --- chunk proposals -------------------------------------------------------

struct Unit {
  std::string key;
  std::vector<Element> body;
};

std::vector<Unit> top_units(const Derivation& d, const Grammar& g) {
  std::vector<Unit> units;
  for (const auto& n : d.roots) {
    if (n.is_pattern()) {
      const auto& p = g.pattern(n.pattern);
      units.push_back({"P" + p.name, p.body});
    } else if (g.find_terminal(n.symbol)) {
      units.push_back({"T" + n.symbol, {Element::terminal(n.symbol)}});
    } else {
      units.push_back({});  // escapes never join a chunk
    }
  }
  for (auto& u : units)
    for (auto& e : u.body) e.id = -1;
  return units;
}

std::vector<ChunkCandidate> propose(const WeightedCorpus& corpus, const Grammar& g, std::size_t k,
                                    const LearnParams& params) {
  std::vector<std::vector<Unit>> streams;
  streams.reserve(corpus.items.size());
  for (const auto& [m, n] : corpus.items) streams.push_back(top_units(best_derivation(m, g), g));

  struct Gram {
    std::uint64_t count = 0;
    std::vector<Element> body;
  };
  std::map<std::string, Gram> all;
  std::set<std::string> frontier;  // keys of (n-1)-grams that met min_count

  for (std::size_t n = 2;; ++n) {
    std::map<std::string, Gram> level;
    for (std::size_t s = 0; s < streams.size(); ++s) {
      const auto& units = streams[s];
      const auto weight = corpus.items[s].second;
      std::unordered_map<std::string, std::size_t> last_end;
      for (std::size_t i = 0; i + n <= units.size(); ++i) {
        std::string key;
        std::size_t len = 0;
        bool ok = true;
        for (std::size_t j = i; j < i + n; ++j) {
          if (units[j].key.empty()) {
            ok = false;
            break;
          }
          len += units[j].body.size();
          key += units[j].key;
          key += '\x1f';
        }
        if (!ok || len > params.max_pattern_len) continue;
        if (n > 2) {
          const std::string prefix = key.substr(0, key.size() - units[i + n - 1].key.size() - 1);
          if (!frontier.count(prefix)) continue;
        }
        auto [it, fresh] = last_end.emplace(key, 0);
        if (!fresh && i < it->second) continue;  // overlaps the previous occurrence
        it->second = i + n;
        auto& gram = level[key];
        if (gram.body.empty())
          for (std::size_t j = i; j < i + n; ++j)
            gram.body.insert(gram.body.end(), units[j].body.begin(), units[j].body.end());
        gram.count += weight;
      }
    }
    frontier.clear();
    for (auto& [key, gram] : level) {
      if (gram.count < params.min_count) continue;
      frontier.insert(key);
      all.emplace(key, std::move(gram));
    }
    if (frontier.empty()) break;
  }

  // Different unit sequences may spell the same body; keep the best count.
  std::map<std::string, ChunkCandidate> by_body;
  for (auto& [key, gram] : all) {
    auto text = body_text(gram.body);
    auto& c = by_body[text];
    if (gram.count > c.count) c = {gram.body, gram.count};
  }
  std::vector<std::pair<std::string, ChunkCandidate>> ranked(by_body.begin(), by_body.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    if (a.second.body.size() != b.second.body.size()) return a.second.body.size() < b.second.body.size();
    return a.first < b.first;
  });
  std::vector<ChunkCandidate> out;
  for (auto& [text, c] : ranked) {
    if (out.size() >= k) break;
    out.push_back(std::move(c));
  }
  return out;
}

// --- class formation -------------------------------------------------------

struct ClassCandidate {
  std::string class_name;  // class of the patterns being generalized
  std::size_t length;
  std::size_t position;
  std::set<std::string> fillers;  // element texts
};

std::vector<ClassCandidate> class_candidates(const Grammar& g) {
  // (class, length, position) -> context text -> filler texts
  std::map<std::tuple<std::string, std::size_t, std::size_t>,
           std::map<std::string, std::set<std::string>>>
      groups;
  for (const auto& p : g.patterns()) {
    if (p.body.size() < 2) continue;
    for (std::size_t k = 0; k < p.body.size(); ++k) {
      std::string context;
      for (std::size_t j = 0; j < p.body.size(); ++j) {
        context += j == k ? std::string("\x1f") : element_text(p.body[j]);
        context += ' ';
      }
      groups[{p.class_name, p.body.size(), k}][context].insert(element_text(p.body[k]));
    }
  }
  std::vector<ClassCandidate> out;
  std::set<std::tuple<std::string, std::size_t, std::size_t, std::set<std::string>>> seen;
  for (const auto& [where, contexts] : groups) {
    const auto& [cls, len, pos] = where;
    std::set<std::string> uni;
    std::size_t multi = 0;
    for (const auto& [context, fillers] : contexts) {
      if (fillers.size() < 2) continue;
      ++multi;
      uni.insert(fillers.begin(), fillers.end());
      if (seen.emplace(cls, len, pos, fillers).second) out.push_back({cls, len, pos, fillers});
    }
    if (multi >= 2 && seen.emplace(cls, len, pos, uni).second) out.push_back({cls, len, pos, uni});
  }
  return out;
}

Element element_from_text(const std::string& text) {
  if (!text.empty() && text.front() == '@') return Element::slot(text.substr(1));
  return Element::terminal(text);
}

// Applies a class candidate; returns nullopt when the result is not a valid
// grammar (for instance when it would empty a referenced class).
std::optional<Grammar> apply_class(const Grammar& g, const ClassCandidate& cand) {
  auto specs = g.pattern_specs();
  auto taken = taken_names(specs);

  // Reuse a class whose members are exactly the single-element fillers.
  std::string class_name;
  for (const auto& c : g.classes()) {
    std::set<std::string> bodies;
    bool unary = true;
    for (auto m : c.members) {
      const auto& body = g.pattern(m).body;
      if (body.size() != 1) {
        unary = false;
        break;
      }
      bodies.insert(element_text(body[0]));
    }
    if (unary && bodies == cand.fillers && c.name != cand.class_name) {
      class_name = c.name;
      break;
    }
  }

  // Group the affected patterns by context.
  std::map<std::string, std::vector<std::size_t>> contexts;
  std::map<std::string, std::set<std::string>> context_fillers;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    if (s.class_name != cand.class_name || s.body.size() != cand.length) continue;
    std::string context;
    for (std::size_t j = 0; j < s.body.size(); ++j) {
      context += j == cand.position ? std::string("\x1f") : element_text(s.body[j]);
      context += ' ';
    }
    contexts[context].push_back(i);
    context_fillers[context].insert(element_text(s.body[cand.position]));
  }

  std::vector<bool> removed(specs.size(), false);
  std::vector<PatternSpec> added;
  if (class_name.empty()) {
    class_name = fresh_name(taken, "C");
    taken.insert(class_name);
    std::size_t k = 0;
    for (const auto& f : cand.fillers) {
      added.push_back({class_name + "_" + std::to_string(k++), class_name, {element_from_text(f)}, 1});
      taken.insert(added.back().name);
    }
  }
  bool any = false;
  for (const auto& [context, members] : contexts) {
    const auto& fillers = context_fillers[context];
    if (fillers.size() < 2 ||
        !std::includes(cand.fillers.begin(), cand.fillers.end(), fillers.begin(), fillers.end()))
      continue;
    any = true;
    PatternSpec gen;
    gen.name = fresh_name(taken, "g");
    taken.insert(gen.name);
    gen.class_name = cand.class_name;
    gen.body = specs[members.front()].body;
    gen.body[cand.position] = Element::slot(class_name);
    gen.frequency = 0;
    for (auto i : members) {
      removed[i] = true;
      gen.frequency += specs[i].frequency;
    }
    added.push_back(std::move(gen));
  }
  if (!any) return std::nullopt;

  std::vector<PatternSpec> next;
  for (std::size_t i = 0; i < specs.size(); ++i)
    if (!removed[i]) next.push_back(std::move(specs[i]));
  for (auto& a : added) next.push_back(std::move(a));
  try {
    return Grammar::build(std::move(next), g.cost_mode(), g.terminal_specs(), g.max_depth());
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Adds each proposed chunk that lowers DL. Returns each accepted chunk with
// the DL reached after it.
std::vector<std::pair<std::string, Bits>> chunk_round(Grammar& g, Bits& dl, const WeightedCorpus& corpus,
                                     const LearnParams& params) {
  std::vector<std::pair<std::string, Bits>> accepted;
  for (auto& cand : propose(corpus, g, params.candidates_per_iter, params)) {
    const auto text = body_text(cand.body);
    bool exists = false;
    for (const auto& p : g.patterns())
      if (body_text(p.body) == text) exists = true;
    if (exists) continue;
    auto specs = g.pattern_specs();
    const auto name = fresh_name(taken_names(specs), "p");
    specs.push_back({name, std::string(kRootClass), cand.body, cand.count});
    Grammar next =
        refit(Grammar::build(std::move(specs), g.cost_mode(), g.terminal_specs(), g.max_depth()), corpus);
    const Bits next_dl = dl_of(next, corpus);
    if (next_dl < dl - kEpsilon) {
      g = std::move(next);
      dl = next_dl;
      accepted.emplace_back("chunk " + name + " : " + text, dl);
    }
  }
  return accepted;
}

// One greedy round of class formation: the candidate giving the lowest DL.
// A class that does not pay for itself at once is still taken when the
// chunks it enables (one chunk round) bring DL below the current value.
std::optional<std::pair<Grammar, Bits>> best_class_step(const Grammar& g, Bits current_dl,
                                                        const WeightedCorpus& corpus,
                                                        const LearnParams& params) {
  std::optional<std::pair<Grammar, Bits>> best;
  for (const auto& cand : class_candidates(g)) {
    auto next = apply_class(g, cand);
    if (!next) continue;
    Grammar fitted = refit(*next, corpus);
    Bits dl = dl_of(fitted, corpus);
    const Bits bar = best ? best->second : current_dl;
    if (dl >= bar - kEpsilon) chunk_round(fitted, dl, corpus, params);
    if (dl < bar - kEpsilon) best.emplace(std::move(fitted), dl);
  }
  return best;
}

std::optional<Grammar> without_pattern(const Grammar& g, std::size_t index) {
  auto specs = g.pattern_specs();
  specs.erase(specs.begin() + static_cast<std::ptrdiff_t>(index));
  try {
    return Grammar::build(std::move(specs), g.cost_mode(), g.terminal_specs(), g.max_depth());
  } catch (const Error&) {
    return std::nullopt;
  }
}

void check_alphabet(const Grammar& g, const Corpus& corpus) {
  for (const auto& m : corpus.messages)
    for (const auto& s : m.symbols)
      if (!g.find_terminal(s)) throw Error(ErrorCode::kUnknownSymbol, s);
}

}  // namespace

Bits grammar_bits(const Grammar& grammar) {
  Bits total = 0;
  const Bits class_name = grammar.class_name_cost();
  for (const auto& p : grammar.patterns()) {
    total += kPatternHeaderBits;
    for (const auto& e : p.body)
      total += kTagBits + (e.is_terminal() ? grammar.terminal_cost(e.id) : class_name);
  }
  return total;
}

Bits description_length(const Grammar& grammar, const Corpus& corpus) {
  check_alphabet(grammar, corpus);
  return dl_of(grammar, WeightedCorpus(corpus));
}

Grammar initial_grammar(const Corpus& corpus, CostMode mode, int max_depth) {
  return Grammar::terminals_only(symbol_counts(corpus), mode, max_depth);
}

std::vector<ChunkCandidate> propose_chunks(const Corpus& corpus, const Grammar& grammar,
                                           std::size_t k, const LearnParams& params) {
  return propose(WeightedCorpus(corpus), grammar, k, params);
}

Grammar form_classes(const Grammar& grammar, const Corpus& corpus) {
  const WeightedCorpus weighted(corpus);
  Grammar current = grammar;
  Bits dl = dl_of(current, weighted);
  while (auto step = best_class_step(current, dl, weighted, LearnParams{})) {
    current = std::move(step->first);
    dl = step->second;
  }
  return current;
}

std::vector<std::uint64_t> usage_counts(const Grammar& grammar, const Corpus& corpus) {
  return usage_of(grammar, WeightedCorpus(corpus));
}

LearnResult learn(const Corpus& corpus, const LearnParams& params) {
  if (corpus.messages.empty()) throw Error(ErrorCode::kEmptyCorpus, corpus.name);
  const WeightedCorpus weighted(corpus);

  LearnResult result{initial_grammar(corpus, params.cost_mode, params.max_depth), {}, {}};
  Grammar& g = result.grammar;
  Bits dl = dl_of(g, weighted);
  result.dl_trajectory.push_back(dl);
  auto accept = [&](Grammar next, Bits next_dl, std::string what) {
    g = std::move(next);
    dl = next_dl;
    result.dl_trajectory.push_back(dl);
    result.log.push_back(std::move(what));
  };

  for (int iter = 0; iter < params.max_iters; ++iter) {
    bool changed = false;

    {
      Grammar next = g;
      Bits next_dl = dl;
      for (auto& [what, step_dl] : chunk_round(next, next_dl, weighted, params)) {
        result.dl_trajectory.push_back(step_dl);
        result.log.push_back(std::move(what));
        changed = true;
      }
      g = std::move(next);
      dl = next_dl;
    }

    while (auto step = best_class_step(g, dl, weighted, params)) {
      accept(std::move(step->first), step->second, "class step");
      changed = true;
    }

    const auto usage = usage_of(g, weighted);
    std::vector<std::string> rare;
    for (std::size_t i = 0; i < usage.size(); ++i)
      if (usage[i] < params.min_count) rare.push_back(g.pattern(static_cast<std::int32_t>(i)).name);
    for (const auto& name : rare) {
      auto index = g.find_pattern(name);
      if (!index) continue;
      auto next = without_pattern(g, static_cast<std::size_t>(*index));
      if (!next) continue;
      Grammar fitted = refit(*next, weighted);
      const Bits next_dl = dl_of(fitted, weighted);
      if (next_dl < dl - kEpsilon) {
        accept(std::move(fitted), next_dl, "prune " + name);
        changed = true;
      }
    }

    if (!changed) break;
  }
  return result;
}

}  // namespace mbc
