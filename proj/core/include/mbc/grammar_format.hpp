#pragma once

// SPG1: the canonical UTF-8 text form of a grammar. Its bytes are what the
// fingerprint hashes.
//
//   SPG1 <UNIFORM|FREQUENCY> <max_depth>
//   terminal <symbol> freq <n>                           (sorted by symbol)
//   pattern <name> class <class> freq <n> : <elem> ...   (sorted by name)
//
// Slot elements are written `@Class`, terminals as bare tokens. A terminal
// line is written only for terminals that appear in no pattern body or whose
// count differs from 1; all other terminals are implied by the bodies.

#include <string>
#include <string_view>

#include "mbc/grammar.hpp"

namespace mbc {

std::string serialize_grammar(const Grammar& grammar);

/// Throws Error: kSyntaxError (message carries the 1-based line number),
/// kDuplicatePatternName, kUnsortedInput, kEmptyClassReferenced.
Grammar parse_grammar(std::string_view text);

Grammar load_grammar_file(const std::string& path);
void save_grammar_file(const Grammar& grammar, const std::string& path);

}  // namespace mbc
