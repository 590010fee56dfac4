#include "mbc/tools/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mbc/codec.hpp"
#include "mbc/encoding_format.hpp"
#include "mbc/error.hpp"
#include "mbc/grammar_format.hpp"
#include "mbc/lzss.hpp"

namespace mbc::tools {

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  for (double v : values) a.total += v;
  a.mean = a.total / static_cast<double>(values.size());
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  a.median = sorted.size() % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
  return a;
}

ComparisonReport compare(const Grammar& grammar, const Corpus& corpus,
                         std::optional<std::vector<double>> external_bits) {
  if (external_bits && external_bits->size() != corpus.messages.size())
    throw Error(ErrorCode::kSyntaxError,
                "external baseline has " + std::to_string(external_bits->size()) + " rows for " +
                    std::to_string(corpus.messages.size()) + " messages");
  ComparisonReport r;
  r.grammar_file_bits = 8 * serialize_grammar(grammar).size();
  r.amortized_grammar_bits =
      corpus.messages.empty() ? 0 : static_cast<double>(r.grammar_file_bits) / corpus.messages.size();

  std::vector<double> raw, e, file, base, ratio, ratio_h;
  for (std::size_t i = 0; i < corpus.messages.size(); ++i) {
    const Message& m = corpus.messages[i];
    ComparisonRow row;
    row.index = i;
    row.symbols = m.size();
    row.raw_bits = raw_bits(m, grammar);
    const Encoding enc = encode(m, grammar);
    row.e_bits = enc.bit_length;
    row.e_file_bits = 8 * write_encoding(enc, grammar).size();
    row.baseline_bits = baseline_bits(m);
    row.ratio = row.e_bits / row.baseline_bits;
    row.ratio_with_header = static_cast<double>(row.e_file_bits) / row.baseline_bits;
    if (external_bits) row.external_bits = (*external_bits)[i];
    raw.push_back(row.raw_bits);
    e.push_back(row.e_bits);
    file.push_back(static_cast<double>(row.e_file_bits));
    base.push_back(row.baseline_bits);
    ratio.push_back(row.ratio);
    ratio_h.push_back(row.ratio_with_header);
    r.rows.push_back(row);
  }
  r.raw_bits = aggregate(raw);
  r.e_bits = aggregate(e);
  r.e_file_bits = aggregate(file);
  r.baseline_bits = aggregate(base);
  r.ratio = aggregate(ratio);
  r.ratio_with_header = aggregate(ratio_h);
  if (external_bits) r.external_bits = aggregate(*external_bits);
  return r;
}

std::string format_number(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ec == std::errc{} ? end : buf);
}

namespace {

std::string fixed(double value, int precision) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, precision);
  return std::string(buf, ec == std::errc{} ? end : buf);
}

}  // namespace

std::string format_csv(const ComparisonReport& report) {
  const bool ext = report.external_bits.has_value();
  std::string out =
      "row,symbols,raw_bits,e_bits,e_file_bits,baseline_bits,ratio,ratio_with_header,amortized_grammar_bits";
  if (ext) out += ",external_bits";
  out += '\n';
  for (const auto& r : report.rows) {
    out += std::to_string(r.index) + ',' + std::to_string(r.symbols) + ',' + format_number(r.raw_bits) + ',' +
           format_number(r.e_bits) + ',' + std::to_string(r.e_file_bits) + ',' +
           format_number(r.baseline_bits) + ',' + format_number(r.ratio) + ',' +
           format_number(r.ratio_with_header) + ',' + format_number(report.amortized_grammar_bits);
    if (ext) out += ',' + format_number(*r.external_bits);
    out += '\n';
  }
  auto summary = [&](const char* label, double Aggregate::*field, double amortized) {
    out += std::string(label) + ",," + format_number(report.raw_bits.*field) + ',' +
           format_number(report.e_bits.*field) + ',' + format_number(report.e_file_bits.*field) + ',' +
           format_number(report.baseline_bits.*field) + ',' + format_number(report.ratio.*field) + ',' +
           format_number(report.ratio_with_header.*field) + ',' + format_number(amortized);
    if (ext) out += ',' + format_number((*report.external_bits).*field);
    out += '\n';
  };
  summary("total", &Aggregate::total, static_cast<double>(report.grammar_file_bits));
  summary("mean", &Aggregate::mean, report.amortized_grammar_bits);
  summary("median", &Aggregate::median, report.amortized_grammar_bits);
  return out;
}

std::string format_table(const ComparisonReport& report) {
  std::ostringstream out;
  const bool ext = report.external_bits.has_value();
  char line[256];
  std::snprintf(line, sizeof line, "%6s %7s %10s %10s %10s %10s %8s %8s%s\n", "row", "symbols", "raw", "E",
                "E file", "baseline", "ratio", "ratio+h", ext ? "   external" : "");
  out << line;
  for (const auto& r : report.rows) {
    out << std::string(6 - std::min<std::size_t>(6, std::to_string(r.index).size()), ' ') << r.index << ' '
        << std::string(7 - std::min<std::size_t>(7, std::to_string(r.symbols).size()), ' ') << r.symbols;
    for (const auto& v : {fixed(r.raw_bits, 1), fixed(r.e_bits, 2), std::to_string(r.e_file_bits),
                          fixed(r.baseline_bits, 0)})
      out << ' ' << std::string(10 - std::min<std::size_t>(10, v.size()), ' ') << v;
    for (const auto& v : {fixed(r.ratio, 4), fixed(r.ratio_with_header, 4)})
      out << ' ' << std::string(8 - std::min<std::size_t>(8, v.size()), ' ') << v;
    if (ext) {
      const auto v = fixed(*r.external_bits, 0);
      out << ' ' << std::string(10 - std::min<std::size_t>(10, v.size()), ' ') << v;
    }
    out << '\n';
  }
  out << '\n'
      << "messages                " << report.rows.size() << '\n'
      << "total E bits            " << fixed(report.e_bits.total, 2) << '\n'
      << "total E file bits       " << fixed(report.e_file_bits.total, 0) << '\n'
      << "total baseline bits     " << fixed(report.baseline_bits.total, 0) << '\n'
      << "mean ratio              " << fixed(report.ratio.mean, 4) << '\n'
      << "median ratio            " << fixed(report.ratio.median, 4) << '\n'
      << "mean ratio (header)     " << fixed(report.ratio_with_header.mean, 4) << '\n'
      << "grammar file bits       " << report.grammar_file_bits << '\n'
      << "amortized grammar bits  " << fixed(report.amortized_grammar_bits, 2) << " per message\n";
  if (ext) out << "total external bits     " << fixed(report.external_bits->total, 0) << '\n';
  return out.str();
}

std::vector<double> load_external_baseline(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    double v = 0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || end != field.data() + field.size()) {
      if (line_no == 1) continue;  // header
      throw Error(ErrorCode::kSyntaxError, path + ": line " + std::to_string(line_no) + ": not a number");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace mbc::tools
