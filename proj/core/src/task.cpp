#include "geval/task.hpp"

#include <cctype>
#include <fstream>

#include <json.hpp>

namespace geval {

namespace {

// token-subsequence containment: needle's tokens appear contiguously in
// haystack's tokens
bool contains_tokens(const std::vector<std::string>& haystack,
                     const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      if (haystack[i + k] != needle[k]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool contains_placeholder(const std::vector<std::string>& responses,
                          const std::string& placeholder) {
  const std::string needle = lower(placeholder);
  for (const auto& r : responses) {
    if (lower(r).find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

EntityDatabase load_entity_database(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open entity database: " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  EntityDatabase db;
  for (auto& [domain, entities] : doc.items()) {
    for (auto& rec : entities) {
      EntityRecord e;
      e.name = rec.at("name").get<std::string>();
      if (rec.contains("slots")) {
        for (auto& [slot, value] : rec.at("slots").items()) {
          e.slots[slot] = value.get<std::string>();
        }
      }
      db.domains[domain].push_back(std::move(e));
    }
  }
  return db;
}

std::set<std::string> mentioned_entities(
    const std::vector<std::string>& responses, const EntityDatabase& db,
    const std::string& domain) {
  auto it = db.domains.find(domain);
  if (it == db.domains.end()) throw UnknownDomain(domain);

  std::vector<std::vector<std::string>> response_tokens;
  response_tokens.reserve(responses.size());
  for (const auto& r : responses) {
    response_tokens.push_back(tokenize(r, db.tokenization));
  }

  std::set<std::string> found;
  for (const auto& entity : it->second) {
    const auto name_tokens = tokenize(entity.name, db.tokenization);
    for (const auto& toks : response_tokens) {
      if (contains_tokens(toks, name_tokens)) {
        found.insert(entity.name);
        break;
      }
    }
  }
  if (contains_placeholder(responses, "[" + domain + "_name]")) {
    found.insert("*");  // wildcard: matches any gold entity
  }
  return found;
}

bool inform(const DialogTranscript& transcript, const EntityDatabase& db) {
  const GoalSpec& goal = transcript.goal;
  // no entity expected (taxi/police/hospital style goals): vacuously true
  if (goal.gold_entities.empty() || !db.has_domain(goal.domain)) return true;
  const auto mentioned =
      mentioned_entities(transcript.system_responses, db, goal.domain);
  if (mentioned.count("*")) return true;
  for (const auto& name : mentioned) {
    if (goal.gold_entities.count(name)) return true;
  }
  return false;
}

bool success(const DialogTranscript& transcript, const EntityDatabase& db) {
  if (!inform(transcript, db)) return false;
  const GoalSpec& goal = transcript.goal;

  // gold slot values come from the gold entities' records
  std::vector<const EntityRecord*> gold_records;
  if (db.has_domain(goal.domain)) {
    for (const auto& entity : db.domains.at(goal.domain)) {
      if (goal.gold_entities.count(entity.name)) {
        gold_records.push_back(&entity);
      }
    }
  }

  std::vector<std::vector<std::string>> response_tokens;
  for (const auto& r : transcript.system_responses) {
    response_tokens.push_back(tokenize(r, db.tokenization));
  }

  for (const auto& slot : goal.requested) {
    const std::string placeholder = "[" + goal.domain + "_" + slot + "]";
    if (contains_placeholder(transcript.system_responses, placeholder)) {
      continue;
    }
    bool satisfied = false;
    for (const EntityRecord* rec : gold_records) {
      auto it = rec->slots.find(slot);
      if (it == rec->slots.end()) continue;
      const auto value_tokens = tokenize(it->second, db.tokenization);
      for (const auto& toks : response_tokens) {
        if (contains_tokens(toks, value_tokens)) {
          satisfied = true;
          break;
        }
      }
      if (satisfied) break;
    }
    if (!satisfied) return false;
  }
  return true;
}

double combined(double inform_rate, double success_rate, double bleu) {
  auto check = [](double v, const char* name) {
    if (v < 0.0 || v > 1.0) {
      throw OutOfRange(std::string(name) + " outside [0,1]");
    }
  };
  check(inform_rate, "inform_rate");
  check(success_rate, "success_rate");
  check(bleu, "bleu");
  return (inform_rate * 100.0 + success_rate * 100.0) * 0.5 + bleu * 100.0;
}

TaskMetrics evaluate_transcripts(const std::vector<DialogTranscript>& ts,
                                 const EntityDatabase& db) {
  TaskMetrics m;
  m.dialogs = ts.size();
  if (ts.empty()) return m;
  std::size_t informed = 0;
  std::size_t succeeded = 0;
  for (const auto& t : ts) {
    const bool inf = inform(t, db);
    if (inf) ++informed;
    if (inf && success(t, db)) ++succeeded;
  }
  m.inform_rate = static_cast<double>(informed) / ts.size();
  m.success_rate = static_cast<double>(succeeded) / ts.size();
  return m;
}

}  // namespace geval
