#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "czsum/baselines.hpp"
#include "czsum/metrics.hpp"
#include "czsum/pipeline.hpp"
#include "czsum/tokenize.hpp"

namespace {

// Roughly article-shaped Czech-ish text: `sentences` sentences of 8-24 words.
std::string synthetic_text(std::size_t sentences, std::uint64_t seed) {
  static const std::vector<std::string> words{"vláda", "město", "Praha", "řeka", "lidé", "rok", "2017", "policie",
                                              "škola", "nemocnice", "dopravní", "podnik", "starosta", "Brno",
                                              "zastupitelstvo", "rozpočet", "koruna", "říká", "ale", "také"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), len(8, 24);
  std::string out;
  for (std::size_t s = 0; s < sentences; ++s) {
    if (s) out += ' ';
    out += "Dnes";
    for (std::size_t w = 1, n = len(rng); w < n; ++w) out += ' ' + words[pick(rng)];
    out += '.';
  }
  return out;
}

void BM_Tokenize(benchmark::State& state) {
  const auto text = synthetic_text(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(czsum::tokenize_raw(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize)->Arg(25)->Arg(200);

void BM_SplitSentences(benchmark::State& state) {
  const auto text = synthetic_text(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(czsum::split_sentences(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_SplitSentences)->Arg(25)->Arg(200);

// One SumeCzech-sized example: ~400-token article vs ~40-token abstract.
void BM_ScoreExample(benchmark::State& state) {
  const auto candidate = czsum::tokenize_raw(synthetic_text(25, 3));
  const auto reference = czsum::tokenize_raw(synthetic_text(3, 4));
  for (auto _ : state) benchmark::DoNotOptimize(czsum::score_tokens(candidate, reference));
}
BENCHMARK(BM_ScoreExample);

void BM_Lcs(benchmark::State& state) {
  const auto a = czsum::tokenize_raw(synthetic_text(static_cast<std::size_t>(state.range(0)), 5));
  const auto b = czsum::tokenize_raw(synthetic_text(static_cast<std::size_t>(state.range(0)), 6));
  for (auto _ : state) benchmark::DoNotOptimize(czsum::lcs_length(a, b));
  state.SetComplexityN(static_cast<std::int64_t>(a.size()));
}
BENCHMARK(BM_Lcs)->RangeMultiplier(4)->Range(4, 256)->Complexity(benchmark::oNSquared);

void BM_PageRank(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  czsum::SentenceGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.set_symmetric(i, j, w(rng));
  const czsum::TextRankConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(czsum::pagerank(g, cfg));
}
BENCHMARK(BM_PageRank)->Arg(10)->Arg(50)->Arg(200);

void BM_TextRankBaseline(benchmark::State& state) {
  const auto text = synthetic_text(static_cast<std::size_t>(state.range(0)), 8);
  const czsum::TextRankConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(czsum::textrank_baseline(text, cfg));
}
BENCHMARK(BM_TextRankBaseline)->Arg(25)->Arg(100);

void BM_ChunkForTranslation(benchmark::State& state) {
  const auto text = synthetic_text(400, 9);
  for (auto _ : state) benchmark::DoNotOptimize(czsum::chunk_for_translation(text, 300));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ChunkForTranslation);

}  // namespace

BENCHMARK_MAIN();
