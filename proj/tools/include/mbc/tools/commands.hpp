#pragma once

// The mbc subcommands as plain functions so tests can drive them without a
// process boundary. Each returns the process exit code:
//   0 success, 1 contract violation, 2 input error, 3 grammar/alphabet mismatch.

#include <iosfwd>
#include <optional>
#include <string>

#include "mbc/corpus.hpp"
#include "mbc/error.hpp"
#include "mbc/induction.hpp"

namespace mbc::tools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitContract = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitMismatch = 3;

int exit_code_for(ErrorCode code);

struct LearnOptions {
  std::string corpus;
  std::string out;
  LearnParams params;
  Tokenizer tokenizer = Tokenizer::kWords;
  bool verbose = false;
};

struct EncodeOptions {
  std::string grammar;
  std::string in;
  std::string out;
  Tokenizer tokenizer = Tokenizer::kWords;
};

struct CompareOptions {
  std::string grammar;
  std::string corpus;
  bool csv = false;
  std::optional<std::string> external_baseline;
  Tokenizer tokenizer = Tokenizer::kWords;
};

struct RoundtripOptions {
  std::string grammar;
  std::string corpus;
  Tokenizer tokenizer = Tokenizer::kWords;
  // Flips one bit of this message's encoding before decoding; exercises the
  // mismatch report.
  std::optional<std::size_t> corrupt_message;
};

struct GenCorpusOptions {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
};

struct SendOptions {
  std::string grammar;
  std::string corpus;
  std::string connect;
  Tokenizer tokenizer = Tokenizer::kWords;
};

struct RecvOptions {
  std::string grammar;
  std::string listen;
  std::string out;
  Tokenizer tokenizer = Tokenizer::kWords;
};

int cmd_learn(const LearnOptions& opts, std::ostream& out, std::ostream& err);
/// Writes one SPE1 record per corpus line, concatenated.
int cmd_encode(const EncodeOptions& opts, std::ostream& out, std::ostream& err);
int cmd_decode(const EncodeOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err);
int cmd_roundtrip(const RoundtripOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gen_corpus(const GenCorpusOptions& opts, std::ostream& out, std::ostream& err);
int cmd_send(const SendOptions& opts, std::ostream& out, std::ostream& err);
/// Prints "listening on HOST:PORT" once bound, so port 0 can be used.
int cmd_recv(const RecvOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace mbc::tools
