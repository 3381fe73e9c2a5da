// Throughput of the lexical scoring path over synthetic output batches.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>
#include <vector>

#include "geval/lexical.hpp"
#include "geval/tokenize.hpp"
#include "geval/wire.hpp"

namespace {

std::uint64_t splitmix(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t x = state;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::string sentence(std::uint64_t& state) {
  static const char* words[] = {"the", "cat",  "sat", "on",   "mat",  "dog",
                                "ran", "fast", "and", "then", "went", "home"};
  const std::size_t n = 5 + splitmix(state) % 12;
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out.push_back(' ');
    out += words[splitmix(state) % 12];
  }
  return out;
}

std::vector<geval::SystemOutput> make_outputs(std::size_t n) {
  std::uint64_t state = 99;
  std::vector<geval::SystemOutput> outputs;
  outputs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    outputs.push_back({"id" + std::to_string(i), sentence(state),
                       sentence(state), {sentence(state)}, ""});
  }
  return outputs;
}

void BM_ScoreOutputs(benchmark::State& state) {
  const auto outputs = make_outputs(static_cast<std::size_t>(state.range(0)));
  geval::ScoreOptions opts;
  opts.threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(geval::score_outputs(outputs, opts));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(outputs.size()));
}
BENCHMARK(BM_ScoreOutputs)
    ->Args({1000, 1})
    ->Args({1000, 4})
    ->Args({10000, 1})
    ->Args({10000, 8})
    ->Unit(benchmark::kMillisecond);

void BM_Tokenize(benchmark::State& state) {
  std::uint64_t s = 7;
  std::vector<std::string> texts;
  for (int i = 0; i < 1000; ++i) texts.push_back(sentence(s));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(geval::tokenize(texts[i++ % texts.size()], {}));
  }
}
BENCHMARK(BM_Tokenize);

void BM_Chrf(benchmark::State& state) {
  std::uint64_t s = 13;
  const std::string hyp = sentence(s);
  const std::string ref = sentence(s);
  for (auto _ : state) {
    benchmark::DoNotOptimize(geval::chrf(hyp, ref));
  }
}
BENCHMARK(BM_Chrf);

}  // namespace

BENCHMARK_MAIN();
