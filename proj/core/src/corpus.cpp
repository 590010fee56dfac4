#include "mbc/corpus.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "mbc/error.hpp"

namespace mbc {
namespace {

bool needs_escape(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' || c == ':' ||
         c == '@' || c == '\\';
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // stray continuation or invalid lead byte: one symbol per byte
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Message tokenize(std::string_view line, Tokenizer mode) {
  if (mode == Tokenizer::kWords) return make_message(line);
  Message m;
  static constexpr char kHex[] = "0123456789abcdef";
  std::size_t i = 0;
  while (i < line.size()) {
    const auto c = static_cast<unsigned char>(line[i]);
    if (needs_escape(c)) {
      m.symbols.push_back(std::string{'\\', 'x', kHex[c >> 4], kHex[c & 0xF]});
      ++i;
      continue;
    }
    std::size_t len = 1;
    const std::size_t want = std::min(utf8_length(c), line.size() - i);
    while (len < want && (static_cast<unsigned char>(line[i + len]) >> 6) == 0x2) ++len;
    m.symbols.emplace_back(line.substr(i, len));
    i += len;
  }
  return m;
}

std::string detokenize(const Message& message, Tokenizer mode) {
  if (mode == Tokenizer::kWords) {
    std::string out;
    for (std::size_t k = 0; k < message.symbols.size(); ++k) {
      if (k) out += ' ';
      out += message.symbols[k];
    }
    return out;
  }
  std::string out;
  for (const auto& s : message.symbols) {
    if (s.size() == 4 && s[0] == '\\' && s[1] == 'x' && hex_value(s[2]) >= 0 && hex_value(s[3]) >= 0)
      out.push_back(static_cast<char>(hex_value(s[2]) * 16 + hex_value(s[3])));
    else
      out += s;
  }
  return out;
}

Corpus parse_corpus(std::string_view text, Tokenizer mode, std::string name) {
  Corpus c;
  c.name = std::move(name);
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    c.messages.push_back(tokenize(line, mode));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return c;
}

Corpus load_corpus(const std::string& path, Tokenizer mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), mode, path);
}

std::string format_corpus(const Corpus& corpus, Tokenizer mode) {
  std::string out;
  for (const auto& m : corpus.messages) {
    out += detokenize(m, mode);
    out += '\n';
  }
  return out;
}

std::vector<TerminalSpec> symbol_counts(const Corpus& corpus) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& m : corpus.messages)
    for (const auto& s : m.symbols) ++counts[s];
  std::vector<TerminalSpec> out;
  out.reserve(counts.size());
  for (auto& [name, n] : counts) out.push_back({name, n});
  return out;
}

}  // namespace mbc
