#include "mbc/grammar_format.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "mbc/error.hpp"

namespace mbc {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void syntax(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kSyntaxError, "line " + std::to_string(line_no) + ": " + what);
}

std::uint64_t parse_count(std::string_view text, std::size_t line_no) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || v == 0)
    syntax(line_no, "expected a positive integer, got '" + std::string(text) + "'");
  return v;
}

}  // namespace

std::string serialize_grammar(const Grammar& grammar) {
  std::ostringstream out;
  out << "SPG1 " << to_string(grammar.cost_mode()) << ' ' << grammar.max_depth() << '\n';

  std::vector<bool> in_body(grammar.alphabet().size(), false);
  for (const auto& p : grammar.patterns())
    for (const auto& e : p.body)
      if (e.is_terminal()) in_body[e.id] = true;
  for (std::size_t t = 0; t < grammar.alphabet().size(); ++t) {
    if (in_body[t] && grammar.terminal_counts()[t] == 1) continue;
    out << "terminal " << grammar.alphabet()[t] << " freq " << grammar.terminal_counts()[t]
        << '\n';
  }
  for (const auto& p : grammar.patterns()) {
    out << "pattern " << p.name << " class " << p.class_name << " freq " << p.frequency << " :";
    for (const auto& e : p.body) {
      out << ' ';
      if (e.is_slot()) out << '@';
      out << e.name;
    }
    out << '\n';
  }
  return out.str();
}

Grammar parse_grammar(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.empty()) syntax(1, "missing SPG1 header");

  auto header = split_fields(lines[0]);
  if (header.size() != 3 || header[0] != "SPG1") syntax(1, "expected 'SPG1 <cost_mode> <max_depth>'");
  auto mode = parse_cost_mode(header[1]);
  if (!mode) syntax(1, "unknown cost mode '" + std::string(header[1]) + "'");
  const auto max_depth = parse_count(header[2], 1);

  std::vector<TerminalSpec> terminals;
  std::vector<PatternSpec> patterns;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    auto line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto f = split_fields(line);
    if (f.empty()) syntax(line_no, "blank line");
    if (f[0] == "terminal") {
      if (!patterns.empty()) syntax(line_no, "terminal line after pattern lines");
      if (f.size() != 4 || f[2] != "freq") syntax(line_no, "expected 'terminal <symbol> freq <n>'");
      TerminalSpec t{std::string(f[1]), parse_count(f[3], line_no)};
      if (!terminals.empty()) {
        if (terminals.back().name == t.name)
          syntax(line_no, "terminal declared twice: " + t.name);
        if (terminals.back().name > t.name)
          throw Error(ErrorCode::kUnsortedInput, "line " + std::to_string(line_no));
      }
      terminals.push_back(std::move(t));
    } else if (f[0] == "pattern") {
      if (f.size() < 8 || f[2] != "class" || f[4] != "freq" || f[6] != ":")
        syntax(line_no, "expected 'pattern <name> class <class> freq <n> : <elem> ...'");
      PatternSpec p;
      p.name = std::string(f[1]);
      p.class_name = std::string(f[3]);
      p.frequency = parse_count(f[5], line_no);
      for (std::size_t k = 7; k < f.size(); ++k) {
        if (f[k].front() == '@')
          p.body.push_back(Element::slot(std::string(f[k].substr(1))));
        else
          p.body.push_back(Element::terminal(std::string(f[k])));
      }
      if (!patterns.empty()) {
        if (patterns.back().name == p.name)
          throw Error(ErrorCode::kDuplicatePatternName, p.name + " (line " + std::to_string(line_no) + ")");
        if (patterns.back().name > p.name)
          throw Error(ErrorCode::kUnsortedInput, "line " + std::to_string(line_no));
      }
      patterns.push_back(std::move(p));
    } else {
      syntax(line_no, "unknown record '" + std::string(f[0]) + "'");
    }
  }
  if (max_depth > static_cast<std::uint64_t>(Grammar::kUnbounded)) syntax(1, "max_depth too large");
  return Grammar::build(std::move(patterns), *mode, std::move(terminals),
                        static_cast<int>(max_depth));
}

Grammar load_grammar_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grammar(buf.str());
}

void save_grammar_file(const Grammar& grammar, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << serialize_grammar(grammar);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

}  // namespace mbc
