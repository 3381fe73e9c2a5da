#include "geval/ingest.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace geval {

namespace {

std::string lowercase(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\'';
}

// Word-boundary match of a lowercase phrase inside lowercased text.
// Substring matching would over-block ("Scunthorpe").
bool contains_blocked_word(const std::string& lower_text,
                           const std::string& phrase) {
  for (std::size_t pos = lower_text.find(phrase); pos != std::string::npos;
       pos = lower_text.find(phrase, pos + 1)) {
    const bool left_ok = pos == 0 || !is_word_char(lower_text[pos - 1]);
    const std::size_t end = pos + phrase.size();
    const bool right_ok =
        end == lower_text.size() || !is_word_char(lower_text[end]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

enum class DropRule { None, BlockWord, Forum, Score, Length };

DropRule classify(const Dialog& dialog, const FilterPolicy& policy) {
  for (const auto& turn : dialog.turns) {
    const std::string lower_text = lowercase(turn.text);
    for (const auto& word : policy.block_words) {
      if (contains_blocked_word(lower_text, word)) return DropRule::BlockWord;
    }
  }
  for (const auto& turn : dialog.turns) {
    if (!turn.forum.empty() && policy.blocked_forums.count(turn.forum)) {
      return DropRule::Forum;
    }
  }
  if (policy.apply_min_score) {
    for (const auto& turn : dialog.turns) {
      // absent score means "not a forum comment": never score-filtered
      if (turn.score && *turn.score < policy.min_score) {
        return DropRule::Score;
      }
    }
  }
  if (policy.max_turn_chars > 0) {
    for (const auto& turn : dialog.turns) {
      if (turn.text.size() > policy.max_turn_chars) return DropRule::Length;
    }
  }
  return DropRule::None;
}

}  // namespace

std::string FilterStats::to_text() const {
  std::ostringstream out;
  out << "input dialogs:      " << input_dialogs << '\n'
      << "surviving dialogs:  " << surviving_dialogs << '\n'
      << "dropped block-word: " << dropped_block_word << '\n'
      << "dropped forum:      " << dropped_forum << '\n'
      << "dropped score:      " << dropped_score << '\n'
      << "dropped length:     " << dropped_length << '\n';
  return out.str();
}

std::pair<Corpus, FilterStats> filter_corpus(const Corpus& corpus,
                                             const FilterPolicy& policy) {
  Corpus out;
  out.source_tag = corpus.source_tag;
  FilterStats stats;
  stats.input_dialogs = corpus.dialogs.size();
  for (const auto& dialog : corpus.dialogs) {
    switch (classify(dialog, policy)) {
      case DropRule::None:
        out.dialogs.push_back(dialog);
        break;
      case DropRule::BlockWord:
        ++stats.dropped_block_word;
        break;
      case DropRule::Forum:
        ++stats.dropped_forum;
        break;
      case DropRule::Score:
        ++stats.dropped_score;
        break;
      case DropRule::Length:
        ++stats.dropped_length;
        break;
    }
  }
  stats.surviving_dialogs = out.dialogs.size();
  return {std::move(out), stats};
}

FilterPolicy load_filter_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open filter policy: " + path);
  FilterPolicy policy;
  policy.apply_min_score = false;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.erase(s.begin());
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.pop_back();
      return s;
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto split_list = [&](const std::string& v, std::set<std::string>& out,
                          bool lower) {
      std::istringstream items(v);
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.insert(lower ? lowercase(item) : item);
      }
    };
    if (key == "block_words") {
      split_list(value, policy.block_words, true);
    } else if (key == "blocked_forums") {
      split_list(value, policy.blocked_forums, false);
    } else if (key == "min_score") {
      policy.min_score = std::stoi(value);
      policy.apply_min_score = true;
    } else if (key == "max_turn_chars") {
      policy.max_turn_chars = static_cast<std::size_t>(std::stoul(value));
    } else if (!key.empty()) {
      throw std::runtime_error("unknown filter policy key: " + key);
    }
  }
  return policy;
}

}  // namespace geval
