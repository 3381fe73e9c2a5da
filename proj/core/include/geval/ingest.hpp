// Converts external dataset files into Corpus values, applies safety
// filtering, and draws seeded few-shot samples.
//
// The on-disk interchange format is one JSON record per line, UTF-8, LF:
//   {dialog_id, turns: [{speaker, text, score?, forum?}],
//    groundings: [{turn_index, text}], goal?: {domain, constraints,
//    requested, gold_entities}}
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "geval/corpus.hpp"

namespace geval {

struct ParseError : std::runtime_error {
  ParseError(std::size_t record_index, const std::string& what)
      : std::runtime_error("record " + std::to_string(record_index) + ": " +
                           what),
        record_index(record_index) {}
  std::size_t record_index;
};

struct SchemaError : std::runtime_error {
  SchemaError(std::size_t record_index, const std::string& field)
      : std::runtime_error("record " + std::to_string(record_index) +
                           ": missing required field '" + field + "'"),
        record_index(record_index) {}
  std::size_t record_index;
};

struct InsufficientDialogs : std::runtime_error {
  InsufficientDialogs(std::size_t k, std::size_t population)
      : std::runtime_error("requested " + std::to_string(k) +
                           " dialogs from a population of " +
                           std::to_string(population)) {}
};

// Field-name mapping so the same adapter shape covers differently keyed
// source files. Defaults match the interchange format.
struct AdapterConfig {
  std::string dialog_id_field = "dialog_id";
  std::string turns_field = "turns";
  std::string speaker_field = "speaker";
  std::string text_field = "text";
  std::string belief_field = "belief";      // task-oriented: per system turn
  std::string database_field = "database";  // task-oriented: per system turn
  std::string knowledge_field = "knowledge";  // knowledge-grounded
  std::string goal_field = "goal";
  std::string passage_field = "passage";      // conversational QA
  std::string questions_field = "questions";
  std::string answers_field = "answers";
};

struct IngestResult {
  Corpus corpus;
  std::vector<std::string> warnings;
};

// Record-per-dialog layout with turns, belief/database strings, and goal
// annotations; each system turn becomes an instance whose environment is
// the rendered belief-state + database-status text.
IngestResult ingest_taskoriented(const std::string& path,
                                 const AdapterConfig& schema = {});

// Per system turn the record carries the gold knowledge sentence(s);
// environment is those sentences joined by single newlines.
IngestResult ingest_knowledge_grounded(const std::string& path,
                                       const AdapterConfig& schema = {});

// Passage + ordered question/answer list; environment is the passage,
// context accumulates prior Q/A turns, target is the answer.
IngestResult ingest_conversational_qa(const std::string& path,
                                      const AdapterConfig& schema = {});

// Reads/writes the interchange format directly.
IngestResult ingest_generic(const std::string& path);
Corpus read_corpus(const std::string& path);
void write_corpus(const Corpus& corpus, const std::string& path);

// ---- filtering ----

struct FilterPolicy {
  std::set<std::string> block_words;  // lowercase; matched on word boundaries
  int min_score = -1;                 // turns below this are dropped
  bool apply_min_score = true;
  std::set<std::string> blocked_forums;
  std::size_t max_turn_chars = 0;  // 0 disables the length cap
};

struct FilterStats {
  std::size_t input_dialogs = 0;
  std::size_t surviving_dialogs = 0;
  std::size_t dropped_block_word = 0;
  std::size_t dropped_forum = 0;
  std::size_t dropped_score = 0;
  std::size_t dropped_length = 0;

  std::string to_text() const;
};

// Drops whole dialogs: any blocked word (word-boundary, case-insensitive),
// any turn from a blocked forum, any turn below min_score, any turn over
// max_turn_chars. Order preserved; idempotent.
std::pair<Corpus, FilterStats> filter_corpus(const Corpus& corpus,
                                             const FilterPolicy& policy);

FilterPolicy load_filter_policy(const std::string& path);

// ---- few-shot sampling ----

struct FewShotSpec {
  std::size_t k = 50;
  std::uint64_t seed = 0;
};

// Deterministic function of (dialog ids, seed): each dialog_id is keyed by
// a 64-bit hash of (seed, id) and the k smallest keys win; output keeps
// the input's dialog order. Independent of input file ordering.
Corpus sample_fewshot(const Corpus& corpus, const FewShotSpec& spec);

}  // namespace geval
