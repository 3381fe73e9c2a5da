// geval: corpus preparation and evaluation for grounded goal-directed
// dialog systems. Subcommands: ingest, sample, serialize, generate,
// evaluate, tasks, analyze.
//
// Exit codes: 0 success, 2 usage/data error, 3 service error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "geval/client.hpp"
#include "geval/corpus.hpp"
#include "geval/ingest.hpp"
#include "geval/lexical.hpp"
#include "geval/report.hpp"
#include "geval/stats.hpp"
#include "geval/task.hpp"
#include "geval/wire.hpp"

namespace {

using namespace geval;

constexpr int kExitData = 2;
constexpr int kExitService = 3;

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void emit_manifest(const std::string& out_dir, const std::string& command,
                   const std::map<std::string, std::string>& config,
                   const std::map<std::string, std::uint64_t>& seeds,
                   const std::vector<std::string>& inputs) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  RunManifest manifest;
  manifest.command = command;
  manifest.config = config;
  manifest.seeds = seeds;
  for (const auto& path : inputs) {
    manifest.input_digests[path] = file_digest(path);
  }
  write_manifest(manifest, out_dir);
}

int cmd_ingest(const std::string& adapter, const std::string& in_path,
               const std::string& out_path, const std::string& filter_path,
               const std::string& out_dir) {
  IngestResult result;
  if (adapter == "taskoriented") {
    result = ingest_taskoriented(in_path);
  } else if (adapter == "knowledge") {
    result = ingest_knowledge_grounded(in_path);
  } else if (adapter == "qa") {
    result = ingest_conversational_qa(in_path);
  } else if (adapter == "generic") {
    result = ingest_generic(in_path);
  } else {
    std::cerr << "error: unknown adapter '" << adapter << "'\n";
    return kExitData;
  }
  print_warnings(result.warnings);

  Corpus corpus = std::move(result.corpus);
  if (!filter_path.empty()) {
    const FilterPolicy policy = load_filter_policy(filter_path);
    auto [filtered, stats] = filter_corpus(corpus, policy);
    corpus = std::move(filtered);
    std::cout << stats.to_text();
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      std::ofstream stats_out(out_dir + "/filter_stats.txt");
      stats_out << stats.to_text();
      nlohmann::json rec = {{"input_dialogs", stats.input_dialogs},
                            {"surviving_dialogs", stats.surviving_dialogs},
                            {"dropped_block_word", stats.dropped_block_word},
                            {"dropped_forum", stats.dropped_forum},
                            {"dropped_score", stats.dropped_score},
                            {"dropped_length", stats.dropped_length}};
      std::ofstream stats_json(out_dir + "/filter_stats.json");
      stats_json << rec.dump(2) << '\n';
    }
  }

  const auto violations = validate_corpus(corpus);
  for (const auto& v : violations) std::cerr << "violation: " << v << '\n';
  write_corpus(corpus, out_path);
  emit_manifest(out_dir, "ingest",
                {{"adapter", adapter}, {"in", in_path}, {"out", out_path}},
                {}, {in_path});
  std::cerr << "ingested " << corpus.dialogs.size() << " dialogs, "
            << corpus.instance_count() << " instances\n";
  return violations.empty() ? 0 : kExitData;
}

int cmd_sample(const std::string& in_path, const std::string& out_path,
               std::size_t k, std::uint64_t seed, const std::string& out_dir) {
  const Corpus corpus = read_corpus(in_path);
  const Corpus sampled = sample_fewshot(corpus, {k, seed});
  write_corpus(sampled, out_path);
  emit_manifest(out_dir, "sample",
                {{"in", in_path}, {"out", out_path},
                 {"k", std::to_string(k)}},
                {{"sample", seed}}, {in_path});
  std::cerr << "sampled " << sampled.dialogs.size() << " dialogs\n";
  return 0;
}

int cmd_serialize(const std::string& in_path, const std::string& out_path) {
  const Corpus corpus = read_corpus(in_path);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open " << out_path << '\n';
    return kExitData;
  }
  const WireFormatConfig wire;
  for (const auto& dialog : corpus.dialogs) {
    for (const auto& inst : dialog.instances) {
      out << serialize_instance(inst, wire) << '\n';
    }
  }
  return 0;
}

int cmd_generate(const std::string& in_path, const std::string& endpoint,
                 const std::string& out_path, int beam_size,
                 int max_new_tokens, const std::string& out_dir) {
  const Corpus corpus = read_corpus(in_path);
  std::vector<GroundedInstance> instances;
  for (const auto& dialog : corpus.dialogs) {
    for (const auto& inst : dialog.instances) instances.push_back(inst);
  }
  DecodeConfig decode;
  decode.beam_size = beam_size;
  decode.max_new_tokens = max_new_tokens;
  const auto outputs = generate_batch(instances, endpoint, decode);
  std::size_t failed = 0;
  for (const auto& o : outputs) {
    if (!o.error.empty()) ++failed;
  }
  if (failed > 0) {
    std::cerr << "warning: " << failed << " instance(s) failed; error "
              << "markers recorded in the outputs file\n";
  }
  write_outputs(outputs, out_path);
  emit_manifest(out_dir, "generate",
                {{"in", in_path}, {"endpoint", endpoint},
                 {"beam_size", std::to_string(beam_size)}},
                {}, {in_path});
  return 0;
}

std::vector<DialogTranscript> corpus_transcripts(
    const Corpus& corpus, const std::vector<SystemOutput>& outputs) {
  std::map<std::string, const SystemOutput*> by_id;
  for (const auto& o : outputs) by_id[o.instance_id] = &o;
  std::vector<DialogTranscript> transcripts;
  for (const auto& dialog : corpus.dialogs) {
    if (!dialog.goal) continue;
    DialogTranscript t;
    t.dialog_id = dialog.dialog_id;
    t.goal = *dialog.goal;
    for (const auto& inst : dialog.instances) {
      auto it = by_id.find(inst.instance_id);
      if (it != by_id.end()) t.system_responses.push_back(it->second->hypothesis);
    }
    if (!t.system_responses.empty()) transcripts.push_back(std::move(t));
  }
  return transcripts;
}

int cmd_evaluate(CLI::App* cmd) {
  // combined-only arithmetic mode (percent inputs)
  auto* inform_opt = cmd->get_option("--inform");
  if (!inform_opt->empty()) {
    const double inform = inform_opt->as<double>();
    const double success = cmd->get_option("--success")->as<double>();
    const double bleu = cmd->get_option("--bleu")->as<double>();
    const double score =
        combined(inform / 100.0, success / 100.0, bleu / 100.0);
    std::cout << "combined: " << std::fixed << std::setprecision(2) << score
              << '\n';
    return 0;
  }

  const auto outputs_path = cmd->get_option("--outputs")->as<std::string>();
  const auto corpus_path = cmd->get_option("--corpus")->as<std::string>();
  if (outputs_path.empty() || corpus_path.empty()) {
    std::cerr << "error: evaluate needs --outputs and --corpus (or "
                 "--inform/--success/--bleu)\n";
    return kExitData;
  }
  const auto db_path = cmd->get_option("--db")->as<std::string>();
  const auto outputs_b_path = cmd->get_option("--outputs-b")->as<std::string>();
  const auto scorer = cmd->get_option("--scorer")->as<std::string>();
  const auto neural_metric =
      cmd->get_option("--neural-metric")->as<std::string>();
  const auto out_dir = cmd->get_option("--out-dir")->as<std::string>();
  const auto seed = cmd->get_option("--seed")->as<std::uint64_t>();
  const auto threads = cmd->get_option("--threads")->as<unsigned>();

  const Corpus corpus = read_corpus(corpus_path);
  auto outputs = read_outputs(outputs_path);
  if (outputs.empty()) {
    std::cerr << "error: empty outputs file\n";
    return kExitData;
  }
  std::vector<std::string> warnings;
  join_outputs_with_corpus(outputs, corpus, warnings);
  print_warnings(warnings);

  ScoreOptions opts;
  opts.threads = threads;
  MetricReport report = score_outputs(outputs, opts);

  if (!db_path.empty()) {
    const EntityDatabase db = load_entity_database(db_path);
    const auto transcripts = corpus_transcripts(corpus, outputs);
    if (transcripts.empty()) {
      std::cerr << "warning: --db given but no dialog carries a goal; "
                   "task metrics skipped\n";
    } else {
      const TaskMetrics task = evaluate_transcripts(transcripts, db);
      report.corpus["inform"] = task.inform_rate;
      report.corpus["success"] = task.success_rate;
      report.corpus["combined"] =
          combined(task.inform_rate, task.success_rate,
                   report.corpus.at("bleu4")) /
          100.0;  // stored as fraction of 100 like every other entry
    }
  }

  if (!scorer.empty()) {
    try {
      const auto scores = neural_score_batch(outputs, scorer, neural_metric);
      double sum = 0;
      std::size_t count = 0;
      for (auto& [id, entry] : report.per_example) {
        auto it = scores.find(id);
        if (it == scores.end()) continue;
        entry[neural_metric] = it->second;
        sum += it->second;
        ++count;
      }
      if (count > 0) report.corpus[neural_metric] = sum / count;
    } catch (const ServiceUnreachable& e) {
      std::cerr << "warning: " << e.what()
                << "; emitting lexical-only report\n";
      report.warnings.push_back(e.what());
    }
  }

  std::string comparison_text;
  if (!outputs_b_path.empty()) {
    auto outputs_b = read_outputs(outputs_b_path);
    join_outputs_with_corpus(outputs_b, corpus, warnings);
    std::map<std::string, const SystemOutput*> b_by_id;
    for (const auto& o : outputs_b) b_by_id[o.instance_id] = &o;

    MetricReport report_b = score_outputs(outputs_b, opts);
    std::ostringstream cmp;
    cmp << std::fixed << std::setprecision(6);
    // per-example metrics: paired 2-sided t-test
    for (const auto& metric : {"unigram_f1", "knowledge_f1", "chrf"}) {
      PairedSamples samples;
      for (const auto& [id, scores] : report.per_example) {
        auto b = report_b.per_example.find(id);
        if (b == report_b.per_example.end()) continue;
        samples.system_a.push_back(scores.at(metric));
        samples.system_b.push_back(b->second.at(metric));
      }
      if (samples.system_a.size() < 2) continue;
      const TTestResult t = paired_ttest(samples);
      cmp << metric << ": t=" << t.t << " df=" << t.df << " p=" << t.p
          << (t.degenerate_variance ? " (degenerate variance)" : "") << '\n';
    }
    // corpus-pooled BLEU: seeded bootstrap over examples
    std::vector<const SystemOutput*> aligned_a, aligned_b;
    for (const auto& o : outputs) {
      auto b = b_by_id.find(o.instance_id);
      if (b == b_by_id.end()) continue;
      aligned_a.push_back(&o);
      aligned_b.push_back(b->second);
    }
    if (!aligned_a.empty()) {
      const TokenizationConfig tok = opts.tokenization;
      auto stat = [&](const std::vector<std::size_t>& idx) {
        BleuCounts a, b;
        for (std::size_t i : idx) {
          a += bleu_pair_counts(aligned_a[i]->hypothesis,
                                aligned_a[i]->reference, tok);
          b += bleu_pair_counts(aligned_b[i]->hypothesis,
                                aligned_b[i]->reference, tok);
        }
        return bleu_from_counts(a) - bleu_from_counts(b);
      };
      const BootstrapResult boot =
          paired_bootstrap(aligned_a.size(), stat, seed);
      cmp << "bleu4: diff=" << boot.observed << " bootstrap_p=" << boot.p
          << " resamples=" << boot.resamples << '\n';
    }
    comparison_text = cmp.str();
    std::cout << comparison_text;
  }

  print_warnings(report.warnings);
  std::cout << report_to_table(report);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream json_out(out_dir + "/report.json", std::ios::binary);
    json_out << report_to_json(report);
    std::ofstream table_out(out_dir + "/report.txt", std::ios::binary);
    table_out << report_to_table(report);
    if (!comparison_text.empty()) {
      std::ofstream cmp_out(out_dir + "/comparison.txt", std::ios::binary);
      cmp_out << comparison_text;
    }
    emit_manifest(out_dir, "evaluate",
                  {{"outputs", outputs_path}, {"corpus", corpus_path}},
                  {{"bootstrap", seed}}, {outputs_path, corpus_path});
  }
  return 0;
}

int cmd_tasks(const std::string& outputs_a_path,
              const std::string& outputs_b_path,
              const std::string& corpus_path, std::uint64_t seed,
              const std::string& out_dir) {
  const Corpus corpus = read_corpus(corpus_path);
  auto outputs_a = read_outputs(outputs_a_path);
  auto outputs_b = read_outputs(outputs_b_path);
  const auto tasks = build_pairwise_tasks(outputs_a, outputs_b, corpus, seed);
  std::filesystem::create_directories(out_dir);
  write_pairwise_tasks(tasks, out_dir + "/tasks.jsonl",
                       out_dir + "/task_keys.jsonl");
  emit_manifest(out_dir, "tasks",
                {{"outputs_a", outputs_a_path}, {"outputs_b", outputs_b_path}},
                {{"blinding", seed}},
                {outputs_a_path, outputs_b_path, corpus_path});
  std::cerr << "wrote " << tasks.size() << " blinded tasks\n";
  return 0;
}

int cmd_analyze(const std::string& ratings_path, const std::string& keys_path,
                const std::string& report_path, const std::string& out_dir) {
  const auto matrices = read_ratings(ratings_path);
  std::ostringstream out;

  // agreement per question (Krippendorff's alpha, interval metric)
  std::map<std::string, std::map<std::string, double>> agreement;
  for (const auto& [question, matrix] : matrices) {
    try {
      agreement[question]["alpha"] = krippendorff_alpha_interval(matrix);
    } catch (const NoPairableItems&) {
      std::cerr << "warning: no pairable items for question '" << question
                << "'\n";
    }
  }
  out << "Inter-annotator agreement (Krippendorff's alpha, interval)\n"
      << correlation_table(agreement) << '\n';

  // win/tie/loss per question, using the blinding keys to unblind sides
  if (!keys_path.empty()) {
    std::map<std::string, bool> a_is_left;
    std::ifstream keys(keys_path);
    std::string line;
    while (std::getline(keys, line)) {
      if (line.empty()) continue;
      auto rec = nlohmann::json::parse(line);
      a_is_left[rec.at("task_id").get<std::string>()] =
          rec.at("left").get<std::string>() == "a";
    }
    out << "Win/tie/loss (system a vs b)\n";
    for (const auto& [question, matrix] : matrices) {
      // mean rating per (base task, side)
      std::map<std::string, std::pair<double, double>> sums_a, sums_b;
      for (const auto& [key, rating] : matrix.ratings) {
        const std::string& item = key.second;
        const std::size_t sep = item.rfind(':');
        if (sep == std::string::npos) continue;
        const std::string base = item.substr(0, sep);
        const std::string side = item.substr(sep + 1);
        auto k = a_is_left.find(base);
        if (k == a_is_left.end()) continue;
        const bool is_a = (side == "left") == k->second;
        auto& acc = is_a ? sums_a[base] : sums_b[base];
        acc.first += rating;
        acc.second += 1;
      }
      std::vector<int> ra, rb;
      for (const auto& [base, acc] : sums_a) {
        auto b = sums_b.find(base);
        if (b == sums_b.end()) continue;
        ra.push_back(static_cast<int>(std::lround(acc.first / acc.second)));
        rb.push_back(static_cast<int>(
            std::lround(b->second.first / b->second.second)));
      }
      if (ra.empty()) continue;
      const WTL wtl = likert_to_wtl(ra, rb);
      out << "  " << question << ": win=" << wtl.win << " tie=" << wtl.tie
          << " loss=" << wtl.loss << " win%=" << std::fixed
          << std::setprecision(1) << wtl.win_percent() << '\n';
    }
    out << '\n';
  }

  // metric-human correlation when a metric report is supplied
  if (!report_path.empty()) {
    std::ifstream in(report_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const MetricReport report = report_from_json(buffer.str());
    std::map<std::string, std::map<std::string, double>> human;
    for (const auto& [question, matrix] : matrices) {
      for (const auto& item : matrix.items) {
        double sum = 0;
        std::size_t count = 0;
        for (const auto& rater : matrix.raters) {
          auto it = matrix.ratings.find({rater, item});
          if (it == matrix.ratings.end()) continue;
          sum += it->second;
          ++count;
        }
        if (count == 0) continue;
        // strip a :left/:right suffix so ids line up with instances
        const std::size_t sep = item.rfind(':');
        const std::string id =
            sep == std::string::npos ? item : item.substr(0, sep);
        auto& cell = human[id][question];
        cell = sum / count;  // last side wins if both present; close enough
      }
    }
    const auto table = metric_human_correlation(report, human);
    out << "Metric-human correlation (Spearman's rho)\n"
        << correlation_table(table) << '\n';
  }

  std::cout << out.str();
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream file(out_dir + "/analysis.txt", std::ios::binary);
    file << out.str();
    emit_manifest(out_dir, "analyze", {{"ratings", ratings_path}}, {},
                  {ratings_path});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corpus preparation and evaluation for grounded dialog"};
  app.require_subcommand(1);
  app.set_config("--config");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "convert a dataset file");
  std::string adapter = "generic", in_path, out_path, filter_path, out_dir;
  ingest->add_option("--adapter", adapter,
                     "taskoriented|knowledge|qa|generic");
  ingest->add_option("--in", in_path)->required();
  ingest->add_option("--out", out_path)->required();
  ingest->add_option("--filter", filter_path, "filter policy file");
  ingest->add_option("--out-dir", out_dir, "manifest/report directory");

  // sample
  auto* sample = app.add_subcommand("sample", "seeded few-shot sampling");
  std::string s_in, s_out, s_dir;
  std::size_t k = 50;
  std::uint64_t seed = 0;
  sample->add_option("--in", s_in)->required();
  sample->add_option("--out", s_out)->required();
  sample->add_option("--k", k);
  sample->add_option("--seed", seed);
  sample->add_option("--out-dir", s_dir);

  // serialize
  auto* serialize = app.add_subcommand("serialize", "emit training text");
  std::string z_in, z_out;
  serialize->add_option("--in", z_in)->required();
  serialize->add_option("--out", z_out)->required();

  // generate
  auto* generate = app.add_subcommand("generate", "call a generation service");
  std::string g_in, g_out, g_endpoint, g_dir;
  int beam_size = 5, max_new_tokens = 128;
  generate->add_option("--in", g_in)->required();
  generate->add_option("--out", g_out)->required();
  generate->add_option("--endpoint", g_endpoint)
      ->envname("GEVAL_ENDPOINT")
      ->required();
  generate->add_option("--beam-size", beam_size);
  generate->add_option("--max-new-tokens", max_new_tokens);
  generate->add_option("--out-dir", g_dir);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score system outputs");
  evaluate->add_option("--outputs", "system outputs file");
  evaluate->add_option("--corpus", "corpus file");
  evaluate->add_option("--db", "entity database for Inform/Success");
  evaluate->add_option("--outputs-b", "second system for comparison");
  evaluate->add_option("--scorer", "neural scorer endpoint")
      ->envname("GEVAL_SCORER");
  std::string default_metric = "neural";
  evaluate->add_option("--neural-metric", default_metric);
  evaluate->add_option("--out-dir", "report directory");
  evaluate->add_option("--seed", "bootstrap seed")->default_val("0");
  evaluate->add_option("--threads", "scoring threads")->default_val("1");
  evaluate->add_option("--inform", "Inform percent (combined-only mode)");
  evaluate->add_option("--success", "Success percent")->default_val("0");
  evaluate->add_option("--bleu", "BLEU percent")->default_val("0");

  // tasks
  auto* tasks = app.add_subcommand("tasks", "export blinded pairwise tasks");
  std::string t_a, t_b, t_corpus, t_dir = ".";
  std::uint64_t t_seed = 0;
  tasks->add_option("--outputs-a", t_a)->required();
  tasks->add_option("--outputs-b", t_b)->required();
  tasks->add_option("--corpus", t_corpus)->required();
  tasks->add_option("--seed", t_seed);
  tasks->add_option("--out-dir", t_dir);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "ratings analysis");
  std::string a_ratings, a_keys, a_report, a_dir;
  analyze->add_option("--ratings", a_ratings)->required();
  analyze->add_option("--keys", a_keys, "blinding key file for win/tie/loss");
  analyze->add_option("--report", a_report, "metric report for correlation");
  analyze->add_option("--out-dir", a_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      return cmd_ingest(adapter, in_path, out_path, filter_path, out_dir);
    }
    if (*sample) return cmd_sample(s_in, s_out, k, seed, s_dir);
    if (*serialize) return cmd_serialize(z_in, z_out);
    if (*generate) {
      return cmd_generate(g_in, g_endpoint, g_out, beam_size, max_new_tokens,
                          g_dir);
    }
    if (*evaluate) return cmd_evaluate(evaluate);
    if (*tasks) return cmd_tasks(t_a, t_b, t_corpus, t_seed, t_dir);
    if (*analyze) return cmd_analyze(a_ratings, a_keys, a_report, a_dir);
  } catch (const ServiceUnreachable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitService;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
