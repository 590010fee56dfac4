#pragma once

// Planted-structure corpora: sentences drawn from templates over word classes.
//
// JSON spec:
//   {"classes": {"DET": ["the", "a"], ...},
//    "templates": [["DET", "NOUN", "VERB"], ...],
//    "count": 500, "seed": 7}

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mbc/corpus.hpp"

namespace mbc::tools {

struct PlantedSpec {
  std::map<std::string, std::vector<std::string>> classes;
  std::vector<std::vector<std::string>> templates;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

/// Throws kSyntaxError for malformed JSON or a spec that references a missing
/// or empty class.
PlantedSpec parse_planted_spec(const std::string& json_text);
PlantedSpec load_planted_spec(const std::string& path);
std::string planted_spec_json(const PlantedSpec& spec);
void validate(const PlantedSpec& spec);

/// Same spec and seed give the same corpus on every platform: draws come from
/// mt19937_64 reduced by multiply-shift.
Corpus generate(const PlantedSpec& spec);

/// Three determiners, ten nouns and five verbs in one DET NOUN VERB template.
PlantedSpec default_planted_spec(std::size_t count = 500, std::uint64_t seed = 1);

/// Every word of every class, sorted and deduplicated.
std::vector<std::string> planted_words(const PlantedSpec& spec);

}  // namespace mbc::tools
