#include "mbc/tools/planted.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mbc/error.hpp"

namespace mbc::tools {
namespace {

// High 64 bits of x * n, i.e. floor(x * n / 2^64).
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t x = rng();
  const std::uint64_t x_lo = x & 0xFFFFFFFFu, x_hi = x >> 32;
  const std::uint64_t n_lo = n & 0xFFFFFFFFu, n_hi = n >> 32;
  const std::uint64_t lo_lo = x_lo * n_lo;
  const std::uint64_t mid1 = x_hi * n_lo + (lo_lo >> 32);
  const std::uint64_t mid2 = x_lo * n_hi + (mid1 & 0xFFFFFFFFu);
  return x_hi * n_hi + (mid1 >> 32) + (mid2 >> 32);
}

}  // namespace

void validate(const PlantedSpec& spec) {
  if (spec.templates.empty()) throw Error(ErrorCode::kSyntaxError, "spec has no templates");
  for (const auto& [name, words] : spec.classes) {
    if (words.empty()) throw Error(ErrorCode::kSyntaxError, "class " + name + " has no words");
    for (const auto& w : words)
      if (!is_valid_token(w))
        throw Error(ErrorCode::kSyntaxError, "class " + name + ": invalid word '" + w + "'");
  }
  for (std::size_t t = 0; t < spec.templates.size(); ++t) {
    if (spec.templates[t].empty())
      throw Error(ErrorCode::kSyntaxError, "template " + std::to_string(t) + " is empty");
    for (const auto& c : spec.templates[t])
      if (!spec.classes.count(c))
        throw Error(ErrorCode::kSyntaxError, "template " + std::to_string(t) + " uses unknown class " + c);
  }
}

PlantedSpec parse_planted_spec(const std::string& json_text) {
  PlantedSpec spec;
  try {
    const auto j = nlohmann::json::parse(json_text);
    spec.classes = j.at("classes").get<std::map<std::string, std::vector<std::string>>>();
    spec.templates = j.at("templates").get<std::vector<std::vector<std::string>>>();
    spec.count = j.at("count").get<std::size_t>();
    spec.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSyntaxError, e.what());
  }
  validate(spec);
  return spec;
}

PlantedSpec load_planted_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_planted_spec(buf.str());
}

std::string planted_spec_json(const PlantedSpec& spec) {
  nlohmann::ordered_json j;
  j["classes"] = spec.classes;
  j["templates"] = spec.templates;
  j["count"] = spec.count;
  j["seed"] = spec.seed;
  return j.dump(2) + "\n";
}

Corpus generate(const PlantedSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  Corpus c;
  c.name = "planted";
  c.messages.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    const auto& tmpl = spec.templates[spec.templates.size() == 1 ? 0 : draw(rng, spec.templates.size())];
    Message m;
    for (const auto& cls : tmpl) {
      const auto& words = spec.classes.at(cls);
      m.symbols.push_back(words[words.size() == 1 ? 0 : draw(rng, words.size())]);
    }
    c.messages.push_back(std::move(m));
  }
  return c;
}

PlantedSpec default_planted_spec(std::size_t count, std::uint64_t seed) {
  PlantedSpec spec;
  spec.classes["DET"] = {"the", "a", "this"};
  spec.classes["NOUN"] = {"cat", "dog", "bird", "fish", "horse", "mouse", "cow", "fox", "bear", "wolf"};
  spec.classes["VERB"] = {"runs", "sleeps", "eats", "jumps", "swims"};
  spec.templates = {{"DET", "NOUN", "VERB"}};
  spec.count = count;
  spec.seed = seed;
  return spec;
}

std::vector<std::string> planted_words(const PlantedSpec& spec) {
  std::set<std::string> words;
  for (const auto& [name, list] : spec.classes) words.insert(list.begin(), list.end());
  return {words.begin(), words.end()};
}

}  // namespace mbc::tools
