#include <gtest/gtest.h>

#include "mbc/corpus.hpp"

namespace mbc {
namespace {

TEST(Corpus, WordMode) {
  const auto c = parse_corpus("the cat\n  a   dog \n\nend", Tokenizer::kWords);
  ASSERT_EQ(c.messages.size(), 4u);
  EXPECT_EQ(c.messages[0], make_message("the cat"));
  EXPECT_EQ(c.messages[1], make_message("a dog"));
  EXPECT_TRUE(c.messages[2].empty());
  EXPECT_EQ(format_corpus(c), "the cat\na dog\n\nend\n");
}

TEST(Corpus, CharacterModeEscapesReservedCharacters) {
  const auto m = tokenize("a b:\xC3\xA9", Tokenizer::kCharacters);
  const std::vector<std::string> want = {"a", "\\x20", "b", "\\x3a", "\xC3\xA9"};
  EXPECT_EQ(m.symbols, want);
  EXPECT_EQ(detokenize(m, Tokenizer::kCharacters), "a b:\xC3\xA9");
  EXPECT_EQ(detokenize(tokenize("\\x41 @", Tokenizer::kCharacters), Tokenizer::kCharacters), "\\x41 @");
}

TEST(Corpus, SymbolCountsSorted) {
  const auto c = parse_corpus("b a b\nc b\n", Tokenizer::kWords);
  const auto counts = symbol_counts(c);
  ASSERT_EQ(counts.size(), 3u);
  EXPECT_EQ(counts[0].name, "a");
  EXPECT_EQ(counts[1].count, 3u);
}

}  // namespace
}  // namespace mbc
