#include "geval/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_map>

namespace geval {

namespace {

// Bag intersection size of two token lists.
std::size_t bag_intersection(const std::vector<std::string>& a,
                             const std::vector<std::string>& b) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& t : a) ++counts[t];
  std::size_t overlap = 0;
  for (const auto& t : b) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  return overlap;
}

double f1_from_tokens(const std::vector<std::string>& hyp,
                      const std::vector<std::string>& ref) {
  if (hyp.empty() && ref.empty()) return 1.0;
  if (hyp.empty() || ref.empty()) return 0.0;
  const double overlap = static_cast<double>(bag_intersection(hyp, ref));
  if (overlap == 0.0) return 0.0;
  const double precision = overlap / static_cast<double>(hyp.size());
  const double recall = overlap / static_cast<double>(ref.size());
  return 2.0 * precision * recall / (precision + recall);
}

// Word n-grams joined with an unlikely separator.
void count_ngrams(const std::vector<std::string>& tokens, std::size_t order,
                  std::unordered_map<std::string, std::uint64_t>& out) {
  if (tokens.size() < order) return;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < order; ++k) {
      key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++out[key];
  }
}

}  // namespace

double unigram_f1(const std::string& hypothesis, const std::string& reference,
                  const TokenizationConfig& cfg) {
  return f1_from_tokens(tokenize(hypothesis, cfg), tokenize(reference, cfg));
}

double knowledge_f1(const std::string& hypothesis,
                    const std::vector<std::string>& knowledge,
                    const TokenizationConfig& cfg, bool* flagged) {
  if (flagged) *flagged = false;
  if (knowledge.empty()) {
    if (flagged) *flagged = true;
    return 0.0;
  }
  std::string joined;
  for (const auto& sentence : knowledge) {
    if (!joined.empty()) joined.push_back(' ');
    joined += sentence;
  }
  return unigram_f1(hypothesis, joined, cfg);
}

BleuCounts& BleuCounts::operator+=(const BleuCounts& o) {
  for (std::size_t n = 0; n < 4; ++n) {
    matched[n] += o.matched[n];
    total[n] += o.total[n];
  }
  hyp_len += o.hyp_len;
  ref_len += o.ref_len;
  return *this;
}

BleuCounts bleu_pair_counts(const std::string& hypothesis,
                            const std::string& reference,
                            const TokenizationConfig& cfg) {
  const auto hyp = tokenize(hypothesis, cfg);
  const auto ref = tokenize(reference, cfg);
  BleuCounts c;
  c.hyp_len = hyp.size();
  c.ref_len = ref.size();
  for (std::size_t n = 1; n <= 4; ++n) {
    std::unordered_map<std::string, std::uint64_t> hyp_grams;
    std::unordered_map<std::string, std::uint64_t> ref_grams;
    count_ngrams(hyp, n, hyp_grams);
    count_ngrams(ref, n, ref_grams);
    for (const auto& [gram, count] : hyp_grams) {
      c.total[n - 1] += count;
      auto it = ref_grams.find(gram);
      if (it != ref_grams.end()) {
        c.matched[n - 1] += std::min(count, it->second);  // clipping
      }
    }
  }
  return c;
}

double bleu_from_counts(const BleuCounts& counts) {
  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    if (counts.total[n] == 0 || counts.matched[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(counts.matched[n]) /
                        static_cast<double>(counts.total[n]));
  }
  if (counts.hyp_len == 0) return 0.0;
  const double bp =
      std::exp(std::min(0.0, 1.0 - static_cast<double>(counts.ref_len) /
                                       static_cast<double>(counts.hyp_len)));
  return bp * std::exp(log_sum / 4.0);
}

double corpus_bleu4(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const TokenizationConfig& cfg) {
  if (pairs.empty()) throw EmptyCorpus();
  BleuCounts pooled;
  for (const auto& [hyp, ref] : pairs) {
    pooled += bleu_pair_counts(hyp, ref, cfg);
  }
  return bleu_from_counts(pooled);
}

double chrf(const std::string& hypothesis, const std::string& reference,
            const ChrfParams& params) {
  const auto hyp = params.remove_ws ? utf8_codepoints_no_ws(hypothesis)
                                    : utf8_codepoints(hypothesis);
  const auto ref = params.remove_ws ? utf8_codepoints_no_ws(reference)
                                    : utf8_codepoints(reference);
  if (hyp.empty() && ref.empty()) return 1.0;

  double precision_sum = 0.0;
  double recall_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= params.max_n; ++n) {
    if (ref.size() < static_cast<std::size_t>(n)) break;  // zero ref n-grams
    std::unordered_map<std::u32string, std::uint64_t> ref_grams;
    for (std::size_t i = 0; i + n <= ref.size(); ++i) {
      ++ref_grams[std::u32string(ref.begin() + i, ref.begin() + i + n)];
    }
    std::uint64_t hyp_total = 0;
    std::uint64_t matched = 0;
    if (hyp.size() >= static_cast<std::size_t>(n)) {
      std::unordered_map<std::u32string, std::uint64_t> hyp_grams;
      for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
        ++hyp_grams[std::u32string(hyp.begin() + i, hyp.begin() + i + n)];
      }
      for (const auto& [gram, count] : hyp_grams) {
        hyp_total += count;
        auto it = ref_grams.find(gram);
        if (it != ref_grams.end()) matched += std::min(count, it->second);
      }
    }
    std::uint64_t ref_total = 0;
    for (const auto& [gram, count] : ref_grams) ref_total += count;
    precision_sum += hyp_total ? static_cast<double>(matched) / hyp_total : 0.0;
    recall_sum += static_cast<double>(matched) / ref_total;
    ++orders;
  }
  if (orders == 0) return 0.0;  // non-empty hyp vs empty ref
  const double p = precision_sum / orders;
  const double r = recall_sum / orders;
  const double b2 = params.beta * params.beta;
  const double denom = b2 * p + r;
  if (denom == 0.0) return 0.0;
  return (1.0 + b2) * p * r / denom;
}

MetricReport score_outputs(const std::vector<SystemOutput>& outputs,
                           const ScoreOptions& opts) {
  if (outputs.empty()) throw EmptyCorpus();

  struct Row {
    double f1 = 0, kf1 = 0, chrf = 0;
    bool kf1_flagged = false;
    BleuCounts bleu;
  };
  std::vector<Row> rows(outputs.size());

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& out = outputs[i];
      Row& row = rows[i];
      row.f1 = unigram_f1(out.hypothesis, out.reference, opts.tokenization);
      row.kf1 = knowledge_f1(out.hypothesis, out.knowledge, opts.tokenization,
                             &row.kf1_flagged);
      row.chrf = chrf(out.hypothesis, out.reference, opts.chrf);
      row.bleu = bleu_pair_counts(out.hypothesis, out.reference,
                                  opts.tokenization);
    }
  };

  const unsigned threads = std::max(1u, opts.threads);
  if (threads == 1 || outputs.size() < 2 * threads) {
    work(0, outputs.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (outputs.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(outputs.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  // Reduction is always sequential in input order so parallel and
  // sequential runs are bit-identical.
  MetricReport report;
  BleuCounts pooled;
  double sum_f1 = 0, sum_kf1 = 0, sum_chrf = 0;
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    auto& entry = report.per_example[outputs[i].instance_id];
    entry["unigram_f1"] = rows[i].f1;
    entry["knowledge_f1"] = rows[i].kf1;
    entry["chrf"] = rows[i].chrf;
    sum_f1 += rows[i].f1;
    sum_kf1 += rows[i].kf1;
    sum_chrf += rows[i].chrf;
    if (rows[i].kf1_flagged) ++flagged;
    pooled += rows[i].bleu;
  }
  const double n = static_cast<double>(outputs.size());
  report.corpus["bleu4"] = bleu_from_counts(pooled);
  report.corpus["unigram_f1"] = sum_f1 / n;
  report.corpus["knowledge_f1"] = sum_kf1 / n;
  report.corpus["chrf"] = sum_chrf / n;
  if (flagged > 0) {
    report.warnings.push_back(std::to_string(flagged) +
                              " output(s) had empty knowledge; KF1 scored 0");
  }
  return report;
}

}  // namespace geval
