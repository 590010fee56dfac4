#pragma once

// Corpus files: UTF-8, one message per line. Word mode splits on whitespace;
// character mode makes each code point a symbol, spelling characters that
// cannot appear in a symbol name (whitespace, ':', '@', '\') as `\xHH`.

#include <string>
#include <string_view>
#include <vector>

#include "mbc/grammar.hpp"

namespace mbc {

enum class Tokenizer { kWords, kCharacters };

struct Corpus {
  std::string name;
  std::vector<Message> messages;
};

Message tokenize(std::string_view line, Tokenizer mode);
std::string detokenize(const Message& message, Tokenizer mode);

Corpus parse_corpus(std::string_view text, Tokenizer mode, std::string name = {});
Corpus load_corpus(const std::string& path, Tokenizer mode = Tokenizer::kWords);
std::string format_corpus(const Corpus& corpus, Tokenizer mode = Tokenizer::kWords);

/// Occurrence count of every symbol, ordered by symbol.
std::vector<TerminalSpec> symbol_counts(const Corpus& corpus);

}  // namespace mbc
