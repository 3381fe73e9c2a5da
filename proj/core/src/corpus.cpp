#include "geval/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace geval {

namespace {

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

// instance context must extend prev context + prev target, i.e. the
// previous turns form a strict prefix and the turn right after the prefix
// is the previous target spoken by the system.
bool extends(const GroundedInstance& prev, const GroundedInstance& cur) {
  if (cur.context.size() < prev.context.size() + 1) return false;
  for (std::size_t i = 0; i < prev.context.size(); ++i) {
    if (!(cur.context[i] == prev.context[i])) return false;
  }
  const DialogTurn& bridge = cur.context[prev.context.size()];
  return bridge.speaker == Speaker::System && bridge.text == prev.target;
}

}  // namespace

std::vector<std::string> validate_corpus(const Corpus& corpus) {
  std::vector<std::string> violations;
  std::unordered_set<std::string> dialog_ids;
  std::unordered_set<std::string> instance_ids;

  for (const auto& dialog : corpus.dialogs) {
    if (!dialog_ids.insert(dialog.dialog_id).second) {
      violations.push_back("duplicate dialog_id: " + dialog.dialog_id);
    }
    for (const auto& inst : dialog.instances) {
      if (!instance_ids.insert(inst.instance_id).second) {
        violations.push_back("duplicate instance_id: " + inst.instance_id);
      }
      if (inst.context.empty()) {
        violations.push_back("instance " + inst.instance_id +
                             ": empty context");
        continue;
      }
      for (const auto& turn : inst.context) {
        if (is_blank(turn.text)) {
          violations.push_back("instance " + inst.instance_id +
                               ": blank turn text");
          break;
        }
      }
      if (inst.context.back().speaker != Speaker::User) {
        violations.push_back("instance " + inst.instance_id +
                             ": last context turn is not the user");
      }
    }
    for (std::size_t i = 1; i < dialog.instances.size(); ++i) {
      if (!extends(dialog.instances[i - 1], dialog.instances[i])) {
        violations.push_back("dialog " + dialog.dialog_id + ": instance " +
                             dialog.instances[i].instance_id +
                             " does not extend its predecessor's context");
      }
    }
  }
  return violations;
}

}  // namespace geval
