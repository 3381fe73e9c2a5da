// End-to-end tests for the geval executable (path injected by CMake).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

const std::string kCli = GEVAL_CLI_PATH;

fs::path workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "geval_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = kCli + " " + args;
  if (!stdout_file.empty()) cmd += " > " + stdout_file;
  cmd += " 2> " + (workdir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream out;
  out << in.rdbuf();
  return out.str();
}

void write(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
}

fs::path fixture_corpus() {
  const auto path = workdir() / "raw.jsonl";
  std::string body;
  for (int i = 0; i < 6; ++i) {
    body += R"({"dialog_id":"d)" + std::to_string(i) +
            R"(","turns":[{"speaker":"user","text":"hi number )" +
            std::to_string(i) +
            R"("},{"speaker":"system","text":"well hello there number )" +
            std::to_string(i) +
            R"("}],"groundings":[{"turn_index":1,"text":"fact )" +
            std::to_string(i) + R"("}]})" "\n";
  }
  write(path, body);
  return path;
}

}  // namespace

TEST_CASE("ingest: fixture converts cleanly, malformed input exits 2") {
  const auto raw = fixture_corpus();
  const auto corpus = workdir() / "corpus.jsonl";
  CHECK(run("ingest --adapter generic --in " + raw.string() + " --out " +
            corpus.string()) == 0);
  CHECK(fs::exists(corpus));

  const auto bad = workdir() / "bad.jsonl";
  write(bad, "{broken\n");
  CHECK(run("ingest --adapter generic --in " + bad.string() + " --out " +
            (workdir() / "nope.jsonl").string()) == 2);
  const auto err = slurp(workdir() / "stderr.txt");
  CHECK(err.find("record 0") != std::string::npos);
}

TEST_CASE("ingest --filter prints matching filter stats") {
  const auto raw = workdir() / "filtered_raw.jsonl";
  write(raw,
        R"({"dialog_id":"ok","turns":[{"speaker":"user","text":"fine"},{"speaker":"system","text":"good"}]})"
        "\n"
        R"({"dialog_id":"nope","turns":[{"speaker":"user","text":"contains badword here"},{"speaker":"system","text":"x"}]})"
        "\n");
  const auto policy = workdir() / "policy.cfg";
  write(policy, "block_words = badword\n");
  const auto out = workdir() / "filter_stdout.txt";
  CHECK(run("ingest --adapter generic --in " + raw.string() + " --out " +
                (workdir() / "filtered.jsonl").string() + " --filter " +
                policy.string(),
            out.string()) == 0);
  const auto text = slurp(out);
  CHECK(text.find("dropped block-word: 1") != std::string::npos);
  CHECK(text.find("surviving dialogs:  1") != std::string::npos);
}

TEST_CASE("sample: deterministic re-run, k over population exits 2") {
  const auto raw = fixture_corpus();
  const auto corpus = workdir() / "corpus2.jsonl";
  REQUIRE(run("ingest --adapter generic --in " + raw.string() + " --out " +
              corpus.string()) == 0);

  const auto s1 = workdir() / "s1.jsonl";
  const auto s2 = workdir() / "s2.jsonl";
  CHECK(run("sample --in " + corpus.string() + " --out " + s1.string() +
            " --k 3 --seed 11") == 0);
  CHECK(run("sample --in " + corpus.string() + " --out " + s2.string() +
            " --k 3 --seed 11") == 0);
  CHECK(slurp(s1) == slurp(s2));

  CHECK(run("sample --in " + corpus.string() + " --out " +
            (workdir() / "s3.jsonl").string() + " --k 99 --seed 1") == 2);
}

TEST_CASE("serialize emits one flat line per instance") {
  const auto raw = fixture_corpus();
  const auto corpus = workdir() / "corpus3.jsonl";
  REQUIRE(run("ingest --adapter generic --in " + raw.string() + " --out " +
              corpus.string()) == 0);
  const auto text = workdir() / "train.txt";
  CHECK(run("serialize --in " + corpus.string() + " --out " +
            text.string()) == 0);
  const auto body = slurp(text);
  CHECK(body.find("User : hi number 0 <|environment|> fact 0 "
                  "=> well hello there number 0\n") != std::string::npos);
}

TEST_CASE("evaluate reproduces the combined arithmetic") {
  const auto out = workdir() / "combined.txt";
  CHECK(run("evaluate --inform 60.60 --success 22.50 --bleu 4.31",
            out.string()) == 0);
  CHECK(slurp(out).find("combined: 45.86") != std::string::npos);

  CHECK(run("evaluate --inform 58.90 --success 9.10 --bleu 4.60",
            out.string()) == 0);
  CHECK(slurp(out).find("combined: 38.60") != std::string::npos);
}

TEST_CASE("evaluate: identity outputs score 1, two-system emits p-values") {
  const auto raw = fixture_corpus();
  const auto corpus = workdir() / "corpus4.jsonl";
  REQUIRE(run("ingest --adapter generic --in " + raw.string() + " --out " +
              corpus.string()) == 0);

  // identity outputs: hypothesis equals the gold target
  const auto outputs = workdir() / "outputs.jsonl";
  const auto outputs_b = workdir() / "outputs_b.jsonl";
  std::string good, bad;
  for (int i = 0; i < 6; ++i) {
    good += R"({"instance_id":"d)" + std::to_string(i) +
            R"(#0","hypothesis":"well hello there number )" +
            std::to_string(i) + R"("})" "\n";
    bad += R"({"instance_id":"d)" + std::to_string(i) +
           R"(#0","hypothesis":"wrong wrong wrong"})" "\n";
  }
  write(outputs, good);
  write(outputs_b, bad);

  const auto report_dir = workdir() / "report";
  const auto out = workdir() / "eval_stdout.txt";
  CHECK(run("evaluate --outputs " + outputs.string() + " --corpus " +
                corpus.string() + " --out-dir " + report_dir.string(),
            out.string()) == 0);
  const auto report = slurp(report_dir / "report.json");
  CHECK(report.find("\"unigram_f1\": 1.0") != std::string::npos);
  CHECK(report.find("\"bleu4\": 1.0") != std::string::npos);
  CHECK(fs::exists(report_dir / "manifest.json"));

  const auto cmp_out = workdir() / "cmp_stdout.txt";
  CHECK(run("evaluate --outputs " + outputs.string() + " --outputs-b " +
                outputs_b.string() + " --corpus " + corpus.string() +
                " --seed 3",
            cmp_out.string()) == 0);
  const auto cmp = slurp(cmp_out);
  CHECK(cmp.find("unigram_f1: t=") != std::string::npos);
  CHECK(cmp.find("bootstrap_p=") != std::string::npos);
}

TEST_CASE("analyze: perfect agreement and low-overlap exit code") {
  const auto ratings = workdir() / "ratings.jsonl";
  std::string body;
  for (int item = 0; item < 4; ++item) {
    for (const char* rater : {"r1", "r2", "r3"}) {
      body += R"({"task_id":"t)" + std::to_string(item) +
              R"(","rater_id":")" + rater +
              R"(","question":"extrinsic","rating":)" +
              std::to_string(1 + item) + "}\n";
    }
  }
  write(ratings, body);
  const auto out = workdir() / "analyze.txt";
  CHECK(run("analyze --ratings " + ratings.string(), out.string()) == 0);
  CHECK(slurp(out).find("1.000") != std::string::npos);

  // a metric report overlapping on fewer than 3 items is a data error
  const auto report = workdir() / "tiny_report.json";
  write(report,
        R"({"corpus":{"bleu4":0.5},"per_example":{"t0":{"chrf":0.5}}})");
  CHECK(run("analyze --ratings " + ratings.string() + " --report " +
            report.string()) == 2);
}
