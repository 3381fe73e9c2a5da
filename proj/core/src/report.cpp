#include "geval/report.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace geval {

using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "geval 0.1.0";

std::string format_percent(double fraction) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << fraction * 100.0;
  return out.str();
}

}  // namespace

std::string report_to_table(const MetricReport& report) {
  std::ostringstream out;
  std::size_t width = 8;
  for (const auto& [name, score] : report.corpus) {
    width = std::max(width, name.size() + 2);
  }
  for (const auto& [name, score] : report.corpus) {
    out << std::setw(static_cast<int>(width)) << name;
  }
  out << '\n';
  for (const auto& [name, score] : report.corpus) {
    out << std::setw(static_cast<int>(width)) << format_percent(score);
  }
  out << '\n';
  return out.str();
}

std::string report_to_json(const MetricReport& report) {
  json doc;
  doc["scale"] = "fraction";
  doc["corpus"] = report.corpus;
  doc["per_example"] = report.per_example;
  if (!report.warnings.empty()) doc["warnings"] = report.warnings;
  return doc.dump(2) + "\n";
}

MetricReport report_from_json(const std::string& text) {
  json doc = json::parse(text);
  MetricReport report;
  for (auto& [name, score] : doc.at("corpus").items()) {
    report.corpus[name] = score.get<double>();
  }
  if (doc.contains("per_example")) {
    for (auto& [id, metrics] : doc.at("per_example").items()) {
      for (auto& [name, score] : metrics.items()) {
        report.per_example[id][name] = score.get<double>();
      }
    }
  }
  if (doc.contains("warnings")) {
    report.warnings = doc.at("warnings").get<std::vector<std::string>>();
  }
  return report;
}

std::string correlation_table(
    const std::map<std::string, std::map<std::string, double>>& table) {
  std::vector<std::string> columns;
  for (const auto& [row, cells] : table) {
    for (const auto& [col, value] : cells) {
      if (std::find(columns.begin(), columns.end(), col) == columns.end()) {
        columns.push_back(col);
      }
    }
  }
  std::size_t row_width = 10;
  for (const auto& [row, cells] : table) {
    row_width = std::max(row_width, row.size() + 2);
  }
  std::ostringstream out;
  out << std::setw(static_cast<int>(row_width)) << "";
  for (const auto& col : columns) {
    out << std::setw(static_cast<int>(std::max<std::size_t>(col.size() + 2, 10)))
        << col;
  }
  out << '\n';
  for (const auto& [row, cells] : table) {
    out << std::setw(static_cast<int>(row_width)) << row;
    for (const auto& col : columns) {
      const int w = static_cast<int>(std::max<std::size_t>(col.size() + 2, 10));
      auto it = cells.find(col);
      if (it == cells.end() || std::isnan(it->second)) {
        out << std::setw(w) << "-";
      } else {
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(3) << it->second;
        out << std::setw(w) << cell.str();
      }
    }
    out << '\n';
  }
  return out.str();
}

std::vector<SystemOutput> read_outputs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open outputs: " + path);
  std::vector<SystemOutput> outputs;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    ++index;
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      throw std::runtime_error("outputs line " + std::to_string(index) +
                               ": malformed JSON");
    }
    SystemOutput out;
    out.instance_id = rec.at("instance_id").get<std::string>();
    if (rec.contains("hypothesis")) {
      out.hypothesis = rec.at("hypothesis").get<std::string>();
    }
    if (rec.contains("reference")) {
      out.reference = rec.at("reference").get<std::string>();
    }
    if (rec.contains("knowledge")) {
      out.knowledge = rec.at("knowledge").get<std::vector<std::string>>();
    }
    if (rec.contains("error")) out.error = rec.at("error").get<std::string>();
    outputs.push_back(std::move(out));
  }
  return outputs;
}

void write_outputs(const std::vector<SystemOutput>& outputs,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  for (const auto& o : outputs) {
    json rec;
    rec["instance_id"] = o.instance_id;
    rec["hypothesis"] = o.hypothesis;
    rec["reference"] = o.reference;
    rec["knowledge"] = o.knowledge;
    if (!o.error.empty()) rec["error"] = o.error;
    out << rec.dump() << '\n';
  }
}

void join_outputs_with_corpus(std::vector<SystemOutput>& outputs,
                              const Corpus& corpus,
                              std::vector<std::string>& warnings) {
  std::map<std::string, const GroundedInstance*> by_id;
  for (const auto& dialog : corpus.dialogs) {
    for (const auto& inst : dialog.instances) by_id[inst.instance_id] = &inst;
  }
  for (auto& out : outputs) {
    auto it = by_id.find(out.instance_id);
    if (it == by_id.end()) {
      warnings.push_back("output instance_id not in corpus: " +
                         out.instance_id);
      continue;
    }
    if (out.reference.empty()) out.reference = it->second->target;
    if (out.knowledge.empty() && !it->second->environment.empty()) {
      out.knowledge = {it->second->environment};
    }
  }
}

std::map<std::string, RatingMatrix> read_ratings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ratings: " + path);
  std::map<std::string, RatingMatrix> matrices;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    ++index;
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      throw std::runtime_error("ratings line " + std::to_string(index) +
                               ": malformed JSON");
    }
    const auto question = rec.at("question").get<std::string>();
    const auto rater = rec.at("rater_id").get<std::string>();
    const auto item = rec.at("task_id").get<std::string>();
    const double rating = rec.at("rating").get<double>();
    auto& m = matrices[question];
    if (rating < m.scale_min || rating > m.scale_max) {
      throw ScaleViolation(rating);
    }
    if (std::find(m.raters.begin(), m.raters.end(), rater) == m.raters.end()) {
      m.raters.push_back(rater);
    }
    if (std::find(m.items.begin(), m.items.end(), item) == m.items.end()) {
      m.items.push_back(item);
    }
    m.ratings[{rater, item}] = rating;
  }
  return matrices;
}

void write_pairwise_tasks(const std::vector<PairwiseTask>& tasks,
                          const std::string& payload_path,
                          const std::string& key_path) {
  std::ofstream payload(payload_path, std::ios::binary);
  std::ofstream keys(key_path, std::ios::binary);
  if (!payload || !keys) {
    throw std::runtime_error("cannot open pairwise task outputs");
  }
  for (const auto& task : tasks) {
    json context = json::array();
    for (const auto& turn : task.context) {
      context.push_back(
          {{"speaker", speaker_name(turn.speaker)}, {"text", turn.text}});
    }
    // rater-facing payload: no system identifiers, no key
    json rec = {{"task_id", task.task_id},
                {"context", std::move(context)},
                {"knowledge", task.knowledge},
                {"left", task.left},
                {"right", task.right},
                {"questions", task.questions}};
    payload << rec.dump() << '\n';
    keys << json{{"task_id", task.task_id},
                 {"left", task.a_is_left ? "a" : "b"}}
                .dump()
         << '\n';
  }
}

std::uint64_t file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for digest: " + path);
  std::uint64_t h = 0xCBF29CE484222325ull;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buffer[i]);
      h *= 0x100000001B3ull;
    }
    if (!in) break;
  }
  return h;
}

void write_manifest(const RunManifest& manifest, const std::string& dir) {
  json doc;
  doc["command"] = manifest.command;
  doc["config"] = manifest.config;
  doc["seeds"] = manifest.seeds;
  json digests;
  for (const auto& [path, digest] : manifest.input_digests) {
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << digest;
    digests[path] = hex.str();
  }
  doc["input_digests"] = std::move(digests);
  doc["tool_version"] =
      manifest.tool_version.empty() ? kToolVersion : manifest.tool_version;
  if (manifest.timestamp.empty()) {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    doc["timestamp"] = buf;
  } else {
    doc["timestamp"] = manifest.timestamp;
  }
  std::ofstream out(dir + "/manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest in " + dir);
  out << doc.dump(2) << '\n';
}

}  // namespace geval
