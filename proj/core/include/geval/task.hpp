// Task-oriented success metrics for MultiWOZ-style dialogs: Inform,
// Success, Combined. Entity matching is normalized token-subsequence
// matching, not fuzzy; delexicalized placeholders like [restaurant_name]
// count as wildcard mentions.
#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "geval/corpus.hpp"
#include "geval/tokenize.hpp"

namespace geval {

struct EntityRecord {
  std::string name;
  std::map<std::string, std::string> slots;
};

struct EntityDatabase {
  std::map<std::string, std::vector<EntityRecord>> domains;
  TokenizationConfig tokenization;  // applied to names/values before matching

  bool has_domain(const std::string& domain) const {
    return domains.count(domain) > 0;
  }
};

// Loads {"domain": [{"name": ..., "slots": {...}}, ...], ...} from JSON.
EntityDatabase load_entity_database(const std::string& path);

struct DialogTranscript {
  std::string dialog_id;
  std::vector<std::string> system_responses;
  GoalSpec goal;
};

struct UnknownDomain : std::runtime_error {
  explicit UnknownDomain(const std::string& d)
      : std::runtime_error("unknown domain: " + d) {}
};
struct MissingGoal : std::runtime_error {
  explicit MissingGoal(const std::string& id)
      : std::runtime_error("dialog has no goal: " + id) {}
};
struct OutOfRange : std::runtime_error {
  explicit OutOfRange(const std::string& what) : std::runtime_error(what) {}
};

// Result includes the wildcard marker "*" when a "[<domain>_name]"
// placeholder appears in any response.
std::set<std::string> mentioned_entities(
    const std::vector<std::string>& responses, const EntityDatabase& db,
    const std::string& domain);

bool inform(const DialogTranscript& transcript, const EntityDatabase& db);
bool success(const DialogTranscript& transcript, const EntityDatabase& db);

// (Inform% + Success%) * 0.5 + BLEU%, computed in percent space.
// Inputs are fractions in [0,1]; the true maximum is 200.
double combined(double inform_rate, double success_rate, double bleu);

struct TaskMetrics {
  double inform_rate = 0;
  double success_rate = 0;
  std::size_t dialogs = 0;
};

TaskMetrics evaluate_transcripts(const std::vector<DialogTranscript>& ts,
                                 const EntityDatabase& db);

}  // namespace geval
