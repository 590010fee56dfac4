#pragma once

// Unsupervised grammar learning by minimum description length: frequent
// top-level chunks become patterns, sibling patterns that differ in one
// position are generalized into a class, and every change is kept only when
// the total description length DL(G) + sum_i |E_i| strictly decreases.

#include <cstdint>
#include <string>
#include <vector>

#include "mbc/corpus.hpp"
#include "mbc/grammar.hpp"

namespace mbc {

/// Fixed price of one pattern in DL(G), on top of its body elements.
inline constexpr Bits kPatternHeaderBits = 16.0;

struct LearnParams {
  int max_iters = 50;
  std::uint64_t min_count = 2;
  std::size_t max_pattern_len = 12;
  std::size_t candidates_per_iter = 20;
  std::uint64_t seed = 0;
  CostMode cost_mode = CostMode::kFrequency;
  int max_depth = kDefaultMaxDepth;
};

struct ChunkCandidate {
  std::vector<Element> body;
  std::uint64_t count = 0;
};

struct LearnResult {
  Grammar grammar;
  std::vector<Bits> dl_trajectory;  // one entry per accepted step, starting with the baseline
  std::vector<std::string> log;
};

/// DL(G): per pattern, the header plus 1 tag bit and a terminal or class-name
/// cost for each body element.
Bits grammar_bits(const Grammar& grammar);

/// DL(G) plus the bit length of every message encoded against G. Throws
/// kUnknownSymbol when a corpus symbol is outside the alphabet.
Bits description_length(const Grammar& grammar, const Corpus& corpus);

/// Terminals-only grammar whose counts are the corpus symbol counts.
Grammar initial_grammar(const Corpus& corpus, CostMode mode, int max_depth = kDefaultMaxDepth);

/// Most frequent runs of adjacent top-level units in the corpus encodings.
/// Ranked by count, then shorter body, then body text; candidates below
/// min_count are dropped.
std::vector<ChunkCandidate> propose_chunks(const Corpus& corpus, const Grammar& grammar,
                                           std::size_t k, const LearnParams& params = {});

/// Generalizes sibling patterns that differ in exactly one position into a
/// slot over a new (or identical existing) class, repeating while DL drops.
Grammar form_classes(const Grammar& grammar, const Corpus& corpus);

/// Pattern use counts (at every depth) over the corpus encodings, indexed
/// like grammar.patterns().
std::vector<std::uint64_t> usage_counts(const Grammar& grammar, const Corpus& corpus);

/// Throws kEmptyCorpus.
LearnResult learn(const Corpus& corpus, const LearnParams& params = {});

}  // namespace mbc
