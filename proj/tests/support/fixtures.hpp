#pragma once

#include <string>
#include <vector>

#include "mbc/grammar.hpp"

namespace mbc::testing {

// d1 in D: t h e; n1 in N: c a t; n2 in N: d o g; s1 in ROOT: @D @N
inline Grammar four_pattern_grammar(CostMode mode = CostMode::kUniform,
                                    std::vector<TerminalSpec> terminals = {}) {
  using E = Element;
  return Grammar::build({{"d1", "D", {E::terminal("t"), E::terminal("h"), E::terminal("e")}, 1},
                         {"n1", "N", {E::terminal("c"), E::terminal("a"), E::terminal("t")}, 1},
                         {"n2", "N", {E::terminal("d"), E::terminal("o"), E::terminal("g")}, 1},
                         {"s1", "ROOT", {E::slot("D"), E::slot("N")}, 1}},
                        mode, std::move(terminals));
}

inline std::vector<TerminalSpec> letters(std::string_view chars) {
  std::vector<TerminalSpec> out;
  for (char c : chars) out.push_back({std::string(1, c), 1});
  return out;
}

}  // namespace mbc::testing
