#include <benchmark/benchmark.h>

#include <random>

#include "mbc/codec.hpp"
#include "mbc/encoding_format.hpp"
#include "mbc/induction.hpp"
#include "mbc/lzss.hpp"
#include "mbc/tools/planted.hpp"

namespace {

const mbc::Corpus& planted_corpus() {
  static const auto c = mbc::tools::generate(mbc::tools::default_planted_spec(500, 1));
  return c;
}

const mbc::Grammar& planted_grammar() {
  static const auto g = mbc::learn(planted_corpus()).grammar;
  return g;
}

void BM_Learn(benchmark::State& state) {
  const auto c = mbc::tools::generate(mbc::tools::default_planted_spec(state.range(0), 1));
  for (auto _ : state) benchmark::DoNotOptimize(mbc::learn(c));
}
BENCHMARK(BM_Learn)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_EncodeMessage(benchmark::State& state) {
  const auto& g = planted_grammar();
  // Runs of planted sentences, state.range(0) symbols long.
  mbc::Message m;
  for (std::size_t k = 0; m.size() < static_cast<std::size_t>(state.range(0)); ++k) {
    const auto& s = planted_corpus().messages[k % planted_corpus().messages.size()];
    m.symbols.insert(m.symbols.end(), s.symbols.begin(), s.symbols.end());
  }
  m.symbols.resize(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mbc::encode(m, g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeMessage)->Arg(3)->Arg(30)->Arg(300);

void BM_DecodeFile(benchmark::State& state) {
  const auto& g = planted_grammar();
  const auto bytes = mbc::write_encoding(mbc::encode(planted_corpus().messages[0], g), g);
  for (auto _ : state) benchmark::DoNotOptimize(mbc::decode(mbc::read_encoding(bytes, g), g));
}
BENCHMARK(BM_DecodeFile);

std::vector<std::uint8_t> lz_input(std::size_t n) {
  std::mt19937_64 rng(7);
  std::vector<std::uint8_t> data(n);
  for (auto& b : data) b = static_cast<std::uint8_t>('a' + rng() % 8);
  return data;
}

void BM_LzCompress(benchmark::State& state) {
  const auto data = lz_input(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mbc::lz::compress(data));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LzCompress)->Arg(1 << 10)->Arg(1 << 16);

void BM_LzDecompress(benchmark::State& state) {
  const auto blob = mbc::lz::compress(lz_input(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mbc::lz::decompress(blob));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LzDecompress)->Arg(1 << 10)->Arg(1 << 16);

}  // namespace
BENCHMARK_MAIN();
