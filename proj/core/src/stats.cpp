#include "geval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace geval {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

// Continued fraction for the regularized incomplete beta (Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 200;
  constexpr double kEps = 3e-15;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

std::vector<double> fractional_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 +
                       1.0;  // average of 1-based ranks i+1..j+1
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw ConstantInput();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log(1.0 - x);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(ln_front) * betacf(a, b, x) / a;
  }
  return 1.0 - std::exp(ln_front) * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

TTestResult paired_ttest(const PairedSamples& samples) {
  const std::size_t n = samples.system_a.size();
  if (n != samples.system_b.size() || n < 2) {
    throw std::invalid_argument("paired samples need equal lengths >= 2");
  }
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = samples.system_a[i] - samples.system_b[i];
  }
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double ss = 0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));

  TTestResult result;
  result.df = n - 1;
  if (sd == 0.0) {
    if (mean == 0.0) {
      result.t = 0.0;
      result.p = 1.0;
    } else {
      result.degenerate_variance = true;
      result.t = mean > 0 ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
      result.p = 0.0;
    }
    return result;
  }
  result.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  result.p = incomplete_beta(result.df / 2.0, 0.5,
                             result.df / (result.df + result.t * result.t));
  return result;
}

double krippendorff_alpha_interval(const RatingMatrix& m) {
  // values per item, pairable items only
  std::vector<std::vector<double>> units;
  for (const auto& item : m.items) {
    std::vector<double> values;
    for (const auto& rater : m.raters) {
      auto it = m.ratings.find({rater, item});
      if (it != m.ratings.end()) values.push_back(it->second);
    }
    if (values.size() >= 2) units.push_back(std::move(values));
  }
  if (units.empty()) throw NoPairableItems();

  double n = 0, pooled_sum = 0, pooled_sq = 0;
  double observed = 0;  // sum over units of pair disagreement / (m_u - 1)
  for (const auto& values : units) {
    const double mu = static_cast<double>(values.size());
    double s = 0, sq = 0;
    for (double v : values) {
      s += v;
      sq += v * v;
    }
    n += mu;
    pooled_sum += s;
    pooled_sq += sq;
    // sum over ordered pairs of (v_i - v_j)^2 = 2*mu*sq - 2*s^2
    observed += (2.0 * mu * sq - 2.0 * s * s) / (mu - 1.0);
  }
  const double expected_pairs = 2.0 * n * pooled_sq - 2.0 * pooled_sum * pooled_sum;
  if (expected_pairs == 0.0) return 1.0;  // all pooled values identical
  const double do_ = observed / n;
  const double de = expected_pairs / (n * (n - 1.0));
  return 1.0 - do_ / de;
}

double spearman_rho(const std::vector<double>& x,
                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw std::invalid_argument("spearman needs equal lengths >= 3");
  }
  return pearson(fractional_ranks(x), fractional_ranks(y));
}

WTL likert_to_wtl(const std::vector<int>& ratings_a,
                  const std::vector<int>& ratings_b) {
  if (ratings_a.size() != ratings_b.size()) throw MisalignedOutputs();
  WTL wtl;
  for (std::size_t i = 0; i < ratings_a.size(); ++i) {
    if (ratings_a[i] < 1 || ratings_a[i] > 5) {
      throw ScaleViolation(ratings_a[i]);
    }
    if (ratings_b[i] < 1 || ratings_b[i] > 5) {
      throw ScaleViolation(ratings_b[i]);
    }
    if (ratings_a[i] > ratings_b[i]) {
      ++wtl.win;
    } else if (ratings_a[i] == ratings_b[i]) {
      ++wtl.tie;
    } else {
      ++wtl.loss;
    }
  }
  return wtl;
}

const std::vector<std::string>& pairwise_questions() {
  static const std::vector<std::string> questions = {
      "Which response sounds more useful? (i.e. contributes to making the "
      "conversation productive, especially towards achieving any stated "
      "goals)",
      "Which speaker sounds more human? (e.g. coherent, fluent, and "
      "natural)",
      "Which response is socially safer? (e.g. friendly, polite, and "
      "empathetic, as opposed to harmful, biased, misinformative, or "
      "incomprehensible)"};
  return questions;
}

std::vector<PairwiseTask> build_pairwise_tasks(
    const std::vector<SystemOutput>& outputs_a,
    const std::vector<SystemOutput>& outputs_b, const Corpus& corpus,
    std::uint64_t seed) {
  if (outputs_a.size() != outputs_b.size()) throw MisalignedOutputs();
  std::map<std::string, const GroundedInstance*> by_id;
  for (const auto& dialog : corpus.dialogs) {
    for (const auto& inst : dialog.instances) {
      by_id[inst.instance_id] = &inst;
    }
  }
  std::vector<PairwiseTask> tasks;
  tasks.reserve(outputs_a.size());
  for (std::size_t i = 0; i < outputs_a.size(); ++i) {
    if (outputs_a[i].instance_id != outputs_b[i].instance_id) {
      throw MisalignedOutputs();
    }
    PairwiseTask task;
    task.task_id = outputs_a[i].instance_id;
    auto it = by_id.find(task.task_id);
    if (it != by_id.end()) {
      task.context = it->second->context;
      task.knowledge = it->second->environment;
    }
    task.a_is_left = (splitmix64(seed ^ fnv1a(task.task_id)) & 1u) == 0;
    task.left = task.a_is_left ? outputs_a[i].hypothesis
                               : outputs_b[i].hypothesis;
    task.right = task.a_is_left ? outputs_b[i].hypothesis
                                : outputs_a[i].hypothesis;
    task.questions = pairwise_questions();
    tasks.push_back(std::move(task));
  }
  return tasks;
}

std::map<std::string, std::map<std::string, double>> metric_human_correlation(
    const MetricReport& report,
    const std::map<std::string, std::map<std::string, double>>& human) {
  std::size_t overlap = 0;
  for (const auto& [id, scores] : report.per_example) {
    if (human.count(id)) ++overlap;
  }
  if (overlap < 3) throw InsufficientOverlap();

  // metric and question name inventories
  std::vector<std::string> metrics;
  for (const auto& [name, score] : report.per_example.begin()->second) {
    metrics.push_back(name);
  }
  std::vector<std::string> questions;
  for (const auto& [id, per_question] : human) {
    for (const auto& [q, rating] : per_question) {
      if (std::find(questions.begin(), questions.end(), q) ==
          questions.end()) {
        questions.push_back(q);
      }
    }
  }

  std::map<std::string, std::map<std::string, double>> table;
  for (const auto& metric : metrics) {
    for (const auto& question : questions) {
      std::vector<double> xs, ys;
      for (const auto& [id, scores] : report.per_example) {
        auto h = human.find(id);
        if (h == human.end()) continue;
        auto q = h->second.find(question);
        auto s = scores.find(metric);
        if (q == h->second.end() || s == scores.end()) continue;
        xs.push_back(s->second);
        ys.push_back(q->second);
      }
      if (xs.size() < 3) continue;
      try {
        table[metric][question] = spearman_rho(xs, ys);
      } catch (const ConstantInput&) {
        table[metric][question] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return table;
}

BootstrapResult paired_bootstrap(
    std::size_t n_examples,
    const std::function<double(const std::vector<std::size_t>&)>& statistic,
    std::uint64_t seed, std::size_t resamples) {
  std::vector<std::size_t> all(n_examples);
  std::iota(all.begin(), all.end(), 0);
  BootstrapResult result;
  result.observed = statistic(all);
  result.resamples = resamples;

  std::size_t non_positive = 0, non_negative = 0;
  std::uint64_t counter = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    std::vector<std::size_t> sample(n_examples);
    for (std::size_t i = 0; i < n_examples; ++i) {
      sample[i] = static_cast<std::size_t>(
          splitmix64(seed + 0x632BE59BD9B4E019ull * ++counter) % n_examples);
    }
    const double stat = statistic(sample);
    if (stat <= 0.0) ++non_positive;
    if (stat >= 0.0) ++non_negative;
  }
  const double p_low = static_cast<double>(non_positive) / resamples;
  const double p_high = static_cast<double>(non_negative) / resamples;
  result.p = std::min(1.0, 2.0 * std::min(p_low, p_high));
  return result;
}

}  // namespace geval
