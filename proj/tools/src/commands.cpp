#include "mbc/tools/commands.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "mbc/codec.hpp"
#include "mbc/encoding_format.hpp"
#include "mbc/grammar_format.hpp"
#include "mbc/tools/planted.hpp"
#include "mbc/tools/report.hpp"
#include "mbc/wire.hpp"

namespace mbc::tools {
namespace {

// Runs `body`, turning exceptions into an exit code and a one-line message.
// `context` names the file or endpoint being worked on when the error hit.
int guarded(std::ostream& err, const std::function<int(std::string& context)>& body) {
  std::string context;
  try {
    return body(context);
  } catch (const Error& e) {
    err << "error: " << (context.empty() ? "" : context + ": ") << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << (context.empty() ? "" : context + ": ") << e.what() << '\n';
    return kExitContract;
  }
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

std::string first_difference(const Message& want, const Message& got) {
  const std::size_t n = std::min(want.size(), got.size());
  for (std::size_t k = 0; k < n; ++k)
    if (want.symbols[k] != got.symbols[k])
      return "symbol " + std::to_string(k) + ": expected '" + want.symbols[k] + "', got '" + got.symbols[k] + "'";
  return "length: expected " + std::to_string(want.size()) + " symbols, got " + std::to_string(got.size());
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFingerprintMismatch:
    case ErrorCode::kUnknownSymbol:
      return kExitMismatch;
    case ErrorCode::kNoCover:
    case ErrorCode::kCoverMismatch:
    case ErrorCode::kProtocolViolation:
      return kExitContract;
    default:
      return kExitInput;
  }
}

int cmd_learn(const LearnOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&](std::string& context) {
    context = opts.corpus;
    const Corpus corpus = load_corpus(opts.corpus, opts.tokenizer);
    context.clear();
    const LearnResult r = learn(corpus, opts.params);
    if (opts.verbose)
      for (const auto& line : r.log) err << line << '\n';
    context = opts.out;
    save_grammar_file(r.grammar, opts.out);
    out << "patterns " << r.grammar.patterns().size() << ", classes " << r.grammar.classes().size()
        << ", DL " << format_number(r.dl_trajectory.front()) << " -> " << format_number(r.dl_trajectory.back())
        << " bits after " << r.dl_trajectory.size() - 1 << " accepted steps\n";
    return kExitOk;
  });
}

int cmd_encode(const EncodeOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&](std::string& context) {
    context = opts.grammar;
    const Grammar g = load_grammar_file(opts.grammar);
    context = opts.in;
    const Corpus corpus = load_corpus(opts.in, opts.tokenizer);
    std::vector<std::uint8_t> bytes;
    Bits bits = 0;
    for (const auto& m : corpus.messages) {
      const Encoding e = encode(m, g);
      bits += e.bit_length;
      const auto record = write_encoding(e, g);
      bytes.insert(bytes.end(), record.begin(), record.end());
    }
    context = opts.out;
    write_bytes(opts.out, bytes.data(), bytes.size());
    out << corpus.messages.size() << " messages, " << format_number(bits) << " code bits, " << bytes.size()
        << " bytes written\n";
    return kExitOk;
  });
}

int cmd_decode(const EncodeOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&](std::string& context) {
    context = opts.grammar;
    const Grammar g = load_grammar_file(opts.grammar);
    context = opts.in;
    const auto bytes = read_bytes(opts.in);
    Corpus corpus;
    std::size_t offset = 0;
    while (offset < bytes.size()) {
      context = opts.in + " at byte " + std::to_string(offset);
      auto [e, used] = read_encoding_prefix(std::span(bytes).subspan(offset), g);
      corpus.messages.push_back(decode(e, g));
      offset += used;
    }
    context = opts.out;
    const auto text = format_corpus(corpus, opts.tokenizer);
    write_bytes(opts.out, text.data(), text.size());
    out << corpus.messages.size() << " messages decoded\n";
    return kExitOk;
  });
}

int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&](std::string& context) {
    context = opts.grammar;
    const Grammar g = load_grammar_file(opts.grammar);
    context = opts.corpus;
    const Corpus corpus = load_corpus(opts.corpus, opts.tokenizer);
    std::optional<std::vector<double>> external;
    if (opts.external_baseline) {
      context = *opts.external_baseline;
      external = load_external_baseline(*opts.external_baseline);
    }
    context = opts.corpus;
    const auto report = compare(g, corpus, std::move(external));
    out << (opts.csv ? format_csv(report) : format_table(report));
    return kExitOk;
  });
}

int cmd_roundtrip(const RoundtripOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&](std::string& context) {
    context = opts.grammar;
    const Grammar g = load_grammar_file(opts.grammar);
    context = opts.corpus;
    const Corpus corpus = load_corpus(opts.corpus, opts.tokenizer);
    context.clear();
    for (std::size_t i = 0; i < corpus.messages.size(); ++i) {
      const Message& m = corpus.messages[i];
      auto bytes = write_encoding(encode(m, g), g);
      if (opts.corrupt_message == i) {
        if (bytes.size() > kEncodingHeaderBytes)
          bytes[kEncodingHeaderBytes] ^= 0x80;
        else
          bytes[4] ^= 0x01;
      }
      Message back;
      try {
        back = decode(read_encoding(bytes, g), g);
      } catch (const Error& e) {
        err << "mismatch: message " << i << " (line " << i + 1 << "): decode failed: " << e.what() << '\n';
        return kExitContract;
      }
      if (back != m) {
        err << "mismatch: message " << i << " (line " << i + 1 << "): " << first_difference(m, back) << '\n';
        return kExitContract;
      }
    }
    out << corpus.messages.size() << " messages roundtripped\n";
    return kExitOk;
  });
}

int cmd_gen_corpus(const GenCorpusOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&](std::string& context) {
    context = opts.spec;
    PlantedSpec spec = load_planted_spec(opts.spec);
    if (opts.seed) spec.seed = *opts.seed;
    const auto text = format_corpus(generate(spec));
    context = opts.out;
    write_bytes(opts.out, text.data(), text.size());
    out << spec.count << " sentences written\n";
    return kExitOk;
  });
}

int cmd_send(const SendOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&](std::string& context) {
    context = opts.grammar;
    const Grammar g = load_grammar_file(opts.grammar);
    context = opts.corpus;
    const Corpus corpus = load_corpus(opts.corpus, opts.tokenizer);
    context = opts.connect;
    const auto [host, port] = wire::parse_endpoint(opts.connect);
    auto channel = wire::connect_tcp(host, port);
    const auto report = wire::run_sender(*channel, g, corpus.messages);
    Bits bits = 0;
    for (auto b : report.encoding_bits) bits += b;
    out << "sent " << corpus.messages.size() << " messages in " << report.frames_sent << " frames, "
        << report.bytes_sent << " bytes on the wire (" << format_number(bits) << " code bits), received "
        << report.frames_received << " frames, " << report.bytes_received << " bytes\n";
    return kExitOk;
  });
}

int cmd_recv(const RecvOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&](std::string& context) {
    context = opts.grammar;
    const Grammar g = load_grammar_file(opts.grammar);
    context = opts.listen;
    const auto [host, port] = wire::parse_endpoint(opts.listen);
    wire::TcpListener listener(host, port);
    out << "listening on " << host << ':' << listener.port() << std::endl;
    auto channel = listener.accept();
    const auto result = wire::run_receiver(*channel, g);
    Corpus corpus{"received", result.messages};
    const auto text = format_corpus(corpus, opts.tokenizer);
    context = opts.out;
    write_bytes(opts.out, text.data(), text.size());
    out << "received " << corpus.messages.size() << " messages, " << result.report.bytes_received
        << " bytes on the wire\n";
    return kExitOk;
  });
}

}  // namespace mbc::tools
