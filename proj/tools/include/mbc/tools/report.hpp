#pragma once

// Per-message comparison of the model-based code against the LZSS baseline.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mbc/corpus.hpp"
#include "mbc/grammar.hpp"

namespace mbc::tools {

struct ComparisonRow {
  std::size_t index = 0;
  std::size_t symbols = 0;
  Bits raw_bits = 0;            // B_N: symbols times the uniform terminal code width
  Bits e_bits = 0;              // bit_length of E
  std::uint64_t e_file_bits = 0;  // SPE1 size on disk, header included
  Bits baseline_bits = 0;
  double ratio = 0;              // e_bits / baseline_bits
  double ratio_with_header = 0;  // e_file_bits / baseline_bits
  std::optional<double> external_bits;
};

struct Aggregate {
  double total = 0;
  double mean = 0;
  double median = 0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  std::uint64_t grammar_file_bits = 0;
  double amortized_grammar_bits = 0;  // grammar_file_bits / message count

  Aggregate raw_bits;
  Aggregate e_bits;
  Aggregate e_file_bits;
  Aggregate baseline_bits;
  Aggregate ratio;
  Aggregate ratio_with_header;
  std::optional<Aggregate> external_bits;
};

Aggregate aggregate(const std::vector<double>& values);

/// Throws kUnknownSymbol when a message leaves the grammar's alphabet, and
/// kSyntaxError when `external_bits` does not have one value per message.
ComparisonReport compare(const Grammar& grammar, const Corpus& corpus,
                         std::optional<std::vector<double>> external_bits = std::nullopt);

/// Shortest decimal that parses back to exactly `value`, independent of locale.
std::string format_number(double value);

std::string format_csv(const ComparisonReport& report);
std::string format_table(const ComparisonReport& report);

/// Reads one number per data row from a CSV file (the last field of each
/// line); a leading non-numeric header row is skipped. Throws kIo or
/// kSyntaxError.
std::vector<double> load_external_baseline(const std::string& path);

}  // namespace mbc::tools
