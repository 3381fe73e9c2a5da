// Report emission (machine-readable JSON plus fixed-width tables shaped
// like the published benchmark tables), system-output and ratings file
// I/O, and the run manifest.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "geval/corpus.hpp"
#include "geval/stats.hpp"

namespace geval {

// Percent, 2 decimals, one column per corpus metric.
std::string report_to_table(const MetricReport& report);
std::string report_to_json(const MetricReport& report);
MetricReport report_from_json(const std::string& text);

// 3 decimals, rows = first key, columns = second key.
std::string correlation_table(
    const std::map<std::string, std::map<std::string, double>>& table);

// One JSON record per line: {instance_id, hypothesis, reference?,
// knowledge?: [string], error?}.
std::vector<SystemOutput> read_outputs(const std::string& path);
void write_outputs(const std::vector<SystemOutput>& outputs,
                   const std::string& path);

// Fills empty reference/knowledge fields from the corpus; complains about
// ids that do not resolve.
void join_outputs_with_corpus(std::vector<SystemOutput>& outputs,
                              const Corpus& corpus,
                              std::vector<std::string>& warnings);

// Ratings file: one JSON record per judgment
// {task_id, rater_id, question: "extrinsic"|"intrinsic"|"safety",
//  rating: 1..5}. Returns one matrix per question.
std::map<std::string, RatingMatrix> read_ratings(const std::string& path);

void write_pairwise_tasks(const std::vector<PairwiseTask>& tasks,
                          const std::string& payload_path,
                          const std::string& key_path);

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::uint64_t> input_digests;  // path -> content hash
  std::string tool_version;
  std::string timestamp;  // informational only, excluded from comparisons
};

std::uint64_t file_digest(const std::string& path);
void write_manifest(const RunManifest& manifest, const std::string& dir);

}  // namespace geval
