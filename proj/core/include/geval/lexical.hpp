// Reference-based lexical metrics: unigram F1, Knowledge-F1, corpus-level
// BLEU-4 (no smoothing) and chrF. All scores are fractions in [0,1];
// percent is a presentation concern (see report.hpp).
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geval/corpus.hpp"
#include "geval/tokenize.hpp"

namespace geval {

struct EmptyCorpus : std::runtime_error {
  EmptyCorpus() : std::runtime_error("empty pair list") {}
};

double unigram_f1(const std::string& hypothesis, const std::string& reference,
                  const TokenizationConfig& cfg);

// F1 of the hypothesis against all knowledge sentences concatenated.
// Empty knowledge scores 0; *flagged (when non-null) records that case so
// corpus aggregation stays total.
double knowledge_f1(const std::string& hypothesis,
                    const std::vector<std::string>& knowledge,
                    const TokenizationConfig& cfg, bool* flagged = nullptr);

// Pooled clipped n-gram counts for one hypothesis/reference pair, n=1..4.
// Summing these per-pair structures in any order and finishing with
// bleu_from_counts reproduces the sequential corpus BLEU bit-exactly.
struct BleuCounts {
  std::array<std::uint64_t, 4> matched{};  // clipped matches per order
  std::array<std::uint64_t, 4> total{};    // hypothesis n-grams per order
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;

  BleuCounts& operator+=(const BleuCounts& o);
};

BleuCounts bleu_pair_counts(const std::string& hypothesis,
                            const std::string& reference,
                            const TokenizationConfig& cfg);
double bleu_from_counts(const BleuCounts& counts);

double corpus_bleu4(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const TokenizationConfig& cfg);

struct ChrfParams {
  int max_n = 6;
  double beta = 2.0;
  bool remove_ws = true;
};

double chrf(const std::string& hypothesis, const std::string& reference,
            const ChrfParams& params = {});

struct ScoreOptions {
  TokenizationConfig tokenization;
  ChrfParams chrf;
  unsigned threads = 1;  // per-example metrics parallelize over outputs
};

// per_example: unigram_f1, knowledge_f1, chrf. corpus: corpus_bleu4 plus
// macro-averages of the per-example metrics. Bit-identical regardless of
// thread count.
MetricReport score_outputs(const std::vector<SystemOutput>& outputs,
                           const ScoreOptions& opts = {});

}  // namespace geval
