// Statistical analysis of metric scores and human ratings: paired 2-sided
// t-test, Krippendorff's alpha (interval metric), Spearman's rho,
// Likert -> win/tie/loss conversion, blinded pairwise-task construction,
// and metric-human correlation tables.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "geval/corpus.hpp"

namespace geval {

struct PairedSamples {
  std::vector<double> system_a;
  std::vector<double> system_b;  // same length, aligned by instance
};

struct TTestResult {
  double t = 0;
  double p = 1;  // 2-sided
  std::size_t df = 0;
  bool degenerate_variance = false;  // sd(d)=0 with mean(d)!=0; p reported 0
};

TTestResult paired_ttest(const PairedSamples& samples);

// Regularized incomplete beta; exposed for the t-distribution CDF.
double incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double df);

struct NoPairableItems : std::runtime_error {
  NoPairableItems() : std::runtime_error("no item has >=2 ratings") {}
};
struct ConstantInput : std::runtime_error {
  ConstantInput() : std::runtime_error("input list is constant") {}
};
struct ScaleViolation : std::runtime_error {
  explicit ScaleViolation(double v)
      : std::runtime_error("rating " + std::to_string(v) +
                           " outside declared scale") {}
};
struct MisalignedOutputs : std::runtime_error {
  MisalignedOutputs() : std::runtime_error("output lists not aligned") {}
};
struct InsufficientOverlap : std::runtime_error {
  InsufficientOverlap() : std::runtime_error("<3 overlapping instances") {}
};

// alpha = 1 - Do/De with squared-difference distance; items with fewer
// than two ratings are excluded; all pooled values identical -> 1.
double krippendorff_alpha_interval(const RatingMatrix& m);

// Pearson correlation of fractional ranks; ties get average rank.
double spearman_rho(const std::vector<double>& x,
                    const std::vector<double>& y);

struct WTL {
  std::size_t win = 0;
  std::size_t tie = 0;
  std::size_t loss = 0;

  std::size_t total() const { return win + tie + loss; }
  double win_percent() const {
    return total() ? 100.0 * static_cast<double>(win) / total() : 0.0;
  }
};

WTL likert_to_wtl(const std::vector<int>& ratings_a,
                  const std::vector<int>& ratings_b);

// One blinded side-by-side judgment unit. `key` (which system is left) is
// stored separately from the rater-facing payload.
struct PairwiseTask {
  std::string task_id;
  std::vector<DialogTurn> context;
  std::string knowledge;
  std::string left;
  std::string right;
  bool a_is_left = false;  // hidden from raters
  std::vector<std::string> questions;
};

// The three fixed judgment prompts (usefulness, humanness, safety).
const std::vector<std::string>& pairwise_questions();

std::vector<PairwiseTask> build_pairwise_tasks(
    const std::vector<SystemOutput>& outputs_a,
    const std::vector<SystemOutput>& outputs_b, const Corpus& corpus,
    std::uint64_t seed);

// Spearman rho per (per-example metric, question) pair.
// human: instance_id -> question -> mean rating.
std::map<std::string, std::map<std::string, double>> metric_human_correlation(
    const MetricReport& report,
    const std::map<std::string, std::map<std::string, double>>& human);

// Seeded percentile bootstrap over examples for corpus-pooled metrics
// (corpus BLEU, Inform, Success) where per-example pairs do not exist.
// statistic(index subset) must return the pooled metric difference a-b.
struct BootstrapResult {
  double observed = 0;
  double p = 1;  // 2-sided percentile p-value of sign(observed)
  std::size_t resamples = 0;
};

BootstrapResult paired_bootstrap(
    std::size_t n_examples,
    const std::function<double(const std::vector<std::size_t>&)>& statistic,
    std::uint64_t seed, std::size_t resamples = 1000);

}  // namespace geval
