#include "geval/ingest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace geval {

using nlohmann::json;

namespace {

Speaker parse_speaker(const std::string& s, std::size_t record_index) {
  if (s == "user") return Speaker::User;
  if (s == "system") return Speaker::System;
  throw ParseError(record_index, "unknown speaker '" + s + "'");
}

json parse_record(const std::string& line, std::size_t record_index) {
  json rec = json::parse(line, nullptr, false);
  if (rec.is_discarded()) {
    throw ParseError(record_index, "malformed JSON");
  }
  if (!rec.is_object()) {
    throw ParseError(record_index, "record is not an object");
  }
  return rec;
}

const json& require(const json& rec, const std::string& field,
                    std::size_t record_index) {
  auto it = rec.find(field);
  if (it == rec.end()) throw SchemaError(record_index, field);
  return *it;
}

GoalSpec parse_goal(const json& g, std::size_t record_index) {
  GoalSpec goal;
  goal.domain = require(g, "domain", record_index).get<std::string>();
  if (g.contains("constraints")) {
    for (auto& [slot, value] : g.at("constraints").items()) {
      goal.constraints[slot] = value.get<std::string>();
    }
  }
  if (g.contains("requested")) {
    for (auto& slot : g.at("requested")) {
      goal.requested.insert(slot.get<std::string>());
    }
  }
  if (g.contains("gold_entities")) {
    for (auto& e : g.at("gold_entities")) {
      goal.gold_entities.insert(e.get<std::string>());
    }
  }
  return goal;
}

// Builds instances from a full turn sequence plus per-system-turn
// environment texts. A system turn only yields an instance when the turn
// before it is a user turn.
Dialog build_dialog(std::string dialog_id, std::vector<DialogTurn> turns,
                    const std::map<std::size_t, std::string>& environments,
                    std::optional<GoalSpec> goal,
                    std::vector<std::string>& warnings) {
  Dialog dialog;
  dialog.dialog_id = std::move(dialog_id);
  dialog.turns = std::move(turns);
  dialog.goal = std::move(goal);
  std::size_t counter = 0;
  for (std::size_t i = 0; i < dialog.turns.size(); ++i) {
    if (dialog.turns[i].speaker != Speaker::System) continue;
    if (i == 0 || dialog.turns[i - 1].speaker != Speaker::User) {
      warnings.push_back("dialog " + dialog.dialog_id + ": system turn " +
                         std::to_string(i) +
                         " not preceded by a user turn; skipped");
      continue;
    }
    GroundedInstance inst;
    inst.instance_id = dialog.dialog_id + "#" + std::to_string(counter++);
    inst.context.assign(dialog.turns.begin(), dialog.turns.begin() + i);
    auto env = environments.find(i);
    if (env != environments.end()) inst.environment = env->second;
    inst.target = dialog.turns[i].text;
    dialog.instances.push_back(std::move(inst));
  }
  return dialog;
}

std::vector<DialogTurn> parse_turns(const json& rec,
                                    const AdapterConfig& schema,
                                    std::size_t record_index) {
  std::vector<DialogTurn> turns;
  for (auto& t : require(rec, schema.turns_field, record_index)) {
    DialogTurn turn;
    turn.speaker = parse_speaker(
        require(t, schema.speaker_field, record_index).get<std::string>(),
        record_index);
    turn.text = require(t, schema.text_field, record_index).get<std::string>();
    if (t.contains("score")) turn.score = t.at("score").get<int>();
    if (t.contains("forum")) turn.forum = t.at("forum").get<std::string>();
    turns.push_back(std::move(turn));
  }
  return turns;
}

template <typename PerRecord>
IngestResult ingest_lines(const std::string& path, const std::string& tag,
                          PerRecord per_record) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input: " + path);
  IngestResult result;
  result.corpus.source_tag = tag;
  std::string line;
  std::size_t record_index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) {
      ++record_index;
      continue;
    }
    per_record(parse_record(line, record_index), record_index, result);
    ++record_index;
  }
  return result;
}

}  // namespace

IngestResult ingest_taskoriented(const std::string& path,
                                 const AdapterConfig& schema) {
  return ingest_lines(path, "taskoriented", [&](const json& rec,
                                                std::size_t idx,
                                                IngestResult& result) {
    auto dialog_id =
        require(rec, schema.dialog_id_field, idx).get<std::string>();
    auto turns = parse_turns(rec, schema, idx);
    // environment = rendered belief state + database status per system turn
    std::map<std::size_t, std::string> environments;
    const json& raw_turns = rec.at(schema.turns_field);
    for (std::size_t i = 0; i < raw_turns.size(); ++i) {
      std::string env;
      if (raw_turns[i].contains(schema.belief_field)) {
        env = raw_turns[i].at(schema.belief_field).get<std::string>();
      }
      if (raw_turns[i].contains(schema.database_field)) {
        const auto db = raw_turns[i].at(schema.database_field).get<std::string>();
        if (!db.empty()) {
          if (!env.empty()) env.push_back('\n');
          env += db;
        }
      }
      if (!env.empty()) environments[i] = env;
    }
    std::optional<GoalSpec> goal;
    if (rec.contains(schema.goal_field)) {
      goal = parse_goal(rec.at(schema.goal_field), idx);
    }
    result.corpus.dialogs.push_back(build_dialog(std::move(dialog_id),
                                                 std::move(turns), environments,
                                                 std::move(goal),
                                                 result.warnings));
  });
}

IngestResult ingest_knowledge_grounded(const std::string& path,
                                       const AdapterConfig& schema) {
  return ingest_lines(path, "knowledge_grounded", [&](const json& rec,
                                                      std::size_t idx,
                                                      IngestResult& result) {
    auto dialog_id =
        require(rec, schema.dialog_id_field, idx).get<std::string>();
    auto turns = parse_turns(rec, schema, idx);
    std::map<std::size_t, std::string> environments;
    const json& raw_turns = rec.at(schema.turns_field);
    for (std::size_t i = 0; i < raw_turns.size(); ++i) {
      if (turns[i].speaker != Speaker::System) continue;
      std::string env;
      std::size_t sentences = 0;
      if (raw_turns[i].contains(schema.knowledge_field)) {
        for (auto& sentence : raw_turns[i].at(schema.knowledge_field)) {
          if (sentences > 0) env.push_back('\n');
          env += sentence.get<std::string>();
          ++sentences;
        }
      }
      if (sentences == 0) {
        result.warnings.push_back("dialog " + dialog_id + ": system turn " +
                                  std::to_string(i) +
                                  " has no gold knowledge sentences");
      } else {
        environments[i] = env;
      }
    }
    result.corpus.dialogs.push_back(build_dialog(std::move(dialog_id),
                                                 std::move(turns), environments,
                                                 std::nullopt,
                                                 result.warnings));
  });
}

IngestResult ingest_conversational_qa(const std::string& path,
                                      const AdapterConfig& schema) {
  return ingest_lines(path, "conversational_qa", [&](const json& rec,
                                                     std::size_t idx,
                                                     IngestResult& result) {
    std::string dialog_id = rec.contains(schema.dialog_id_field)
                                ? rec.at(schema.dialog_id_field).get<std::string>()
                                : "qa-" + std::to_string(idx);
    const auto passage =
        require(rec, schema.passage_field, idx).get<std::string>();
    const json& questions = require(rec, schema.questions_field, idx);
    const json& answers = require(rec, schema.answers_field, idx);
    if (questions.size() != answers.size()) {
      throw ParseError(idx, "question/answer count mismatch");
    }
    if (questions.empty()) {
      result.warnings.push_back("dialog " + dialog_id +
                                ": no questions; skipped");
      return;
    }
    std::vector<DialogTurn> turns;
    std::map<std::size_t, std::string> environments;
    for (std::size_t i = 0; i < questions.size(); ++i) {
      turns.push_back({Speaker::User, questions[i].get<std::string>(), {}, {}});
      environments[turns.size()] = passage;  // same passage for every turn
      turns.push_back({Speaker::System, answers[i].get<std::string>(), {}, {}});
    }
    result.corpus.dialogs.push_back(build_dialog(std::move(dialog_id),
                                                 std::move(turns), environments,
                                                 std::nullopt,
                                                 result.warnings));
  });
}

IngestResult ingest_generic(const std::string& path) {
  return ingest_lines(path, "generic", [&](const json& rec, std::size_t idx,
                                           IngestResult& result) {
    AdapterConfig schema;
    auto dialog_id =
        require(rec, schema.dialog_id_field, idx).get<std::string>();
    auto turns = parse_turns(rec, schema, idx);
    std::map<std::size_t, std::string> environments;
    if (rec.contains("groundings")) {
      for (auto& g : rec.at("groundings")) {
        const auto turn_index = require(g, "turn_index", idx).get<std::size_t>();
        if (turn_index >= turns.size()) {
          throw ParseError(idx, "grounding turn_index out of range");
        }
        auto& env = environments[turn_index];
        if (!env.empty()) env.push_back('\n');
        env += require(g, "text", idx).get<std::string>();
      }
    }
    std::optional<GoalSpec> goal;
    if (rec.contains("goal")) goal = parse_goal(rec.at("goal"), idx);
    result.corpus.dialogs.push_back(build_dialog(std::move(dialog_id),
                                                 std::move(turns), environments,
                                                 std::move(goal),
                                                 result.warnings));
  });
}

Corpus read_corpus(const std::string& path) {
  return ingest_generic(path).corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output: " + path);
  for (const auto& dialog : corpus.dialogs) {
    json rec;
    rec["dialog_id"] = dialog.dialog_id;
    json turns = json::array();
    for (const auto& turn : dialog.turns) {
      json t;
      t["speaker"] = speaker_name(turn.speaker);
      t["text"] = turn.text;
      if (turn.score) t["score"] = *turn.score;
      if (!turn.forum.empty()) t["forum"] = turn.forum;
      turns.push_back(std::move(t));
    }
    rec["turns"] = std::move(turns);
    json groundings = json::array();
    for (const auto& inst : dialog.instances) {
      if (inst.environment.empty()) continue;
      groundings.push_back(
          {{"turn_index", inst.context.size()}, {"text", inst.environment}});
    }
    rec["groundings"] = std::move(groundings);
    if (dialog.goal) {
      json g;
      g["domain"] = dialog.goal->domain;
      g["constraints"] = dialog.goal->constraints;
      g["requested"] = dialog.goal->requested;
      g["gold_entities"] = dialog.goal->gold_entities;
      rec["goal"] = std::move(g);
    }
    out << rec.dump() << '\n';
  }
}

}  // namespace geval
