// Shared domain types for the grounded-dialog evaluation toolkit.
// Everything here is plain immutable-after-construction data; behavior
// lives in the other modules.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace geval {

enum class Speaker { User, System };

inline const char* speaker_name(Speaker s) {
  return s == Speaker::User ? "user" : "system";
}

struct DialogTurn {
  Speaker speaker = Speaker::User;
  std::string text;  // untokenized, as-authored
  // Forum-style metadata carried through from source records; only the
  // filter cares. Absent score means "never filtered by min_score".
  std::optional<int> score;
  std::string forum;

  bool operator==(const DialogTurn& o) const {
    return speaker == o.speaker && text == o.text;
  }
};

// One training/eval unit: dialog context S, environment text E, target T.
struct GroundedInstance {
  std::string instance_id;
  std::vector<DialogTurn> context;  // oldest first
  std::string environment;          // may be empty
  std::string target;
};

struct GoalSpec {
  std::string domain;
  std::map<std::string, std::string> constraints;  // slot -> value
  std::set<std::string> requested;                 // slots the user must be told
  std::set<std::string> gold_entities;             // entities satisfying constraints
};

struct Dialog {
  std::string dialog_id;
  // Full conversation, in order, with source metadata. Instance contexts
  // are prefixes of this sequence.
  std::vector<DialogTurn> turns;
  std::vector<GroundedInstance> instances;  // conversational order
  std::optional<GoalSpec> goal;
};

struct Corpus {
  std::vector<Dialog> dialogs;
  std::string source_tag;  // which adapter produced it

  std::size_t instance_count() const {
    std::size_t n = 0;
    for (const auto& d : dialogs) n += d.instances.size();
    return n;
  }
};

// Per-instance generated response plus everything metrics need.
struct SystemOutput {
  std::string instance_id;
  std::string hypothesis;
  std::string reference;
  std::vector<std::string> knowledge;  // gold grounding sentences for KF1
  std::string error;  // non-empty marks a failed generation, never dropped
};

enum class Scale { Fraction, Percent };

struct MetricReport {
  // instance_id -> metric name -> score (fractions in [0,1])
  std::map<std::string, std::map<std::string, double>> per_example;
  std::map<std::string, double> corpus;
  Scale scale = Scale::Fraction;
  std::vector<std::string> warnings;
};

// Raters x items matrix of ordinal scores on a declared bounded scale.
struct RatingMatrix {
  std::vector<std::string> raters;
  std::vector<std::string> items;
  std::map<std::pair<std::string, std::string>, double> ratings;  // (rater,item)
  double scale_min = 1.0;
  double scale_max = 5.0;
};

// Returns a human-readable description per violated invariant; empty means
// the corpus is well formed. Violations are data, not failures.
std::vector<std::string> validate_corpus(const Corpus& corpus);

}  // namespace geval
