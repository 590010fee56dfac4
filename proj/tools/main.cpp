#include <iostream>

#include <CLI11.hpp>

#include "mbc/tools/commands.hpp"

namespace {

using mbc::Tokenizer;

Tokenizer mode(bool char_mode) { return char_mode ? Tokenizer::kCharacters : Tokenizer::kWords; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-based coding: learn a grammar, encode against it, compare and transmit."};
  app.require_subcommand(1);
  int code = 0;

  {
    auto* cmd = app.add_subcommand("learn", "Learn a grammar from a corpus by minimum description length");
    static mbc::tools::LearnOptions o;
    static bool char_mode = false;
    static std::string cost = "FREQUENCY";
    cmd->add_option("--corpus", o.corpus, "Corpus file, one message per line")->required();
    cmd->add_option("--out", o.out, "Output grammar (SPG1)")->required();
    cmd->add_option("--max-iters", o.params.max_iters)->capture_default_str();
    cmd->add_option("--min-count", o.params.min_count)->capture_default_str();
    cmd->add_option("--max-pattern-len", o.params.max_pattern_len)->capture_default_str();
    cmd->add_option("--seed", o.params.seed, "Recorded for reproducibility; learning is deterministic")
        ->capture_default_str();
    cmd->add_option("--cost-mode", cost, "UNIFORM or FREQUENCY")->capture_default_str();
    cmd->add_flag("--char-mode", char_mode, "One symbol per character");
    cmd->add_flag("-v,--verbose", o.verbose, "Log every accepted step");
    cmd->callback([&] {
      o.tokenizer = mode(char_mode);
      const auto m = mbc::parse_cost_mode(cost);
      if (!m) {
        std::cerr << "error: unknown cost mode " << cost << '\n';
        code = mbc::tools::kExitInput;
        return;
      }
      o.params.cost_mode = *m;
      code = mbc::tools::cmd_learn(o, std::cout, std::cerr);
    });
  }
  {
    static mbc::tools::EncodeOptions enc, dec;
    static bool enc_char = false, dec_char = false;
    auto* e = app.add_subcommand("encode", "Encode a text file against a grammar");
    e->add_option("--grammar", enc.grammar)->required();
    e->add_option("--in", enc.in)->required();
    e->add_option("--out", enc.out)->required();
    e->add_flag("--char-mode", enc_char);
    e->callback([&] {
      enc.tokenizer = mode(enc_char);
      code = mbc::tools::cmd_encode(enc, std::cout, std::cerr);
    });
    auto* d = app.add_subcommand("decode", "Decode an encoding file back to text");
    d->add_option("--grammar", dec.grammar)->required();
    d->add_option("--in", dec.in)->required();
    d->add_option("--out", dec.out)->required();
    d->add_flag("--char-mode", dec_char);
    d->callback([&] {
      dec.tokenizer = mode(dec_char);
      code = mbc::tools::cmd_decode(dec, std::cout, std::cerr);
    });
  }
  {
    auto* cmd = app.add_subcommand("compare", "Compare code sizes with the LZSS baseline");
    static mbc::tools::CompareOptions o;
    static bool char_mode = false;
    static std::string external;
    cmd->add_option("--grammar", o.grammar)->required();
    cmd->add_option("--corpus", o.corpus)->required();
    cmd->add_flag("--csv", o.csv, "CSV instead of a table");
    cmd->add_option("--external-baseline", external, "CSV with one bit count per message");
    cmd->add_flag("--char-mode", char_mode);
    cmd->callback([&] {
      o.tokenizer = mode(char_mode);
      if (!external.empty()) o.external_baseline = external;
      code = mbc::tools::cmd_compare(o, std::cout, std::cerr);
    });
  }
  {
    auto* cmd = app.add_subcommand("roundtrip", "Encode and decode every message, checking identity");
    static mbc::tools::RoundtripOptions o;
    static bool char_mode = false;
    static long corrupt = -1;
    cmd->add_option("--grammar", o.grammar)->required();
    cmd->add_option("--corpus", o.corpus)->required();
    cmd->add_flag("--char-mode", char_mode);
    cmd->add_option("--debug-corrupt", corrupt, "Flip a bit in this message's encoding")->group("");
    cmd->callback([&] {
      o.tokenizer = mode(char_mode);
      if (corrupt >= 0) o.corrupt_message = static_cast<std::size_t>(corrupt);
      code = mbc::tools::cmd_roundtrip(o, std::cout, std::cerr);
    });
  }
  {
    auto* cmd = app.add_subcommand("gen-corpus", "Generate a planted-structure corpus from a JSON spec");
    static mbc::tools::GenCorpusOptions o;
    static std::uint64_t seed = 0;
    cmd->add_option("--spec", o.spec)->required();
    cmd->add_option("--out", o.out)->required();
    auto* seed_opt = cmd->add_option("--seed", seed, "Overrides the spec's seed");
    cmd->callback([&, seed_opt] {
      if (seed_opt->count()) o.seed = seed;
      code = mbc::tools::cmd_gen_corpus(o, std::cout, std::cerr);
    });
  }
  {
    auto* cmd = app.add_subcommand("send", "Transmit a corpus to a receiver");
    static mbc::tools::SendOptions o;
    static bool char_mode = false;
    cmd->add_option("--grammar", o.grammar)->required();
    cmd->add_option("--corpus", o.corpus)->required();
    cmd->add_option("--connect", o.connect, "HOST:PORT")->required();
    cmd->add_flag("--char-mode", char_mode);
    cmd->callback([&] {
      o.tokenizer = mode(char_mode);
      code = mbc::tools::cmd_send(o, std::cout, std::cerr);
    });
  }
  {
    auto* cmd = app.add_subcommand("recv", "Accept one session and write the received messages");
    static mbc::tools::RecvOptions o;
    static bool char_mode = false;
    cmd->add_option("--grammar", o.grammar)->required();
    cmd->add_option("--listen", o.listen, "HOST:PORT; port 0 picks a free port")->required();
    cmd->add_option("--out", o.out)->required();
    cmd->add_flag("--char-mode", char_mode);
    cmd->callback([&] {
      o.tokenizer = mode(char_mode);
      code = mbc::tools::cmd_recv(o, std::cout, std::cerr);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return mbc::tools::kExitInput;
  }
  return code;
}
