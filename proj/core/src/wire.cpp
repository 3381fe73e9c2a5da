#include "geval/wire.hpp"

#include <algorithm>

namespace geval {

namespace {

std::size_t count_occurrences(const std::string& haystack,
                              const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

void check_collision(const std::string& text, const WireFormatConfig& cfg,
                     const std::string& field) {
  if (text.find(cfg.target_marker) != std::string::npos) {
    throw MarkerCollision("target marker '" + cfg.target_marker +
                          "' occurs inside " + field);
  }
  if (text.find(cfg.env_marker) != std::string::npos) {
    throw MarkerCollision("environment marker '" + cfg.env_marker +
                          "' occurs inside " + field);
  }
}

}  // namespace

std::string serialize_instance(const GroundedInstance& instance,
                               const WireFormatConfig& cfg) {
  for (const auto& turn : instance.context) {
    check_collision(turn.text, cfg, "a context turn");
  }
  check_collision(instance.environment, cfg, "the environment");
  check_collision(instance.target, cfg, "the target");

  std::string out;
  for (std::size_t i = 0; i < instance.context.size(); ++i) {
    if (i > 0) out += cfg.turn_separator;
    out += cfg.turn_prefixes.at(instance.context[i].speaker);
    out.push_back(' ');
    out += instance.context[i].text;
  }
  if (!instance.environment.empty()) {
    out.push_back(' ');
    out += cfg.env_marker;
    out.push_back(' ');
    out += instance.environment;
  }
  out.push_back(' ');
  out += cfg.target_marker;
  out.push_back(' ');
  out += instance.target;
  return out;
}

GroundedInstance parse_instance(const std::string& line,
                                const WireFormatConfig& cfg,
                                std::vector<std::string>* warnings) {
  const std::string padded_target = " " + cfg.target_marker + " ";
  const std::size_t marker_count = count_occurrences(line, cfg.target_marker);
  if (marker_count == 0) {
    throw MalformedLine("missing target marker '" + cfg.target_marker + "'");
  }
  if (marker_count > 1) {
    throw MalformedLine("ambiguous: target marker occurs " +
                        std::to_string(marker_count) + " times");
  }
  const std::size_t target_pos = line.find(padded_target);
  if (target_pos == std::string::npos) {
    throw MalformedLine("target marker not space-delimited");
  }

  GroundedInstance inst;
  inst.target = line.substr(target_pos + padded_target.size());
  std::string head = line.substr(0, target_pos);

  const std::string padded_env = " " + cfg.env_marker + " ";
  const std::size_t env_pos = head.find(padded_env);
  if (env_pos != std::string::npos) {
    inst.environment = head.substr(env_pos + padded_env.size());
    head = head.substr(0, env_pos);
  }

  // Split the context region at speaker-prefix boundaries. A prefix only
  // counts at position 0 or right after the turn separator.
  struct Boundary {
    std::size_t pos;
    std::size_t prefix_len;
    Speaker speaker;
  };
  std::vector<Boundary> boundaries;
  for (const auto& [speaker, prefix] : cfg.turn_prefixes) {
    for (std::size_t pos = head.find(prefix); pos != std::string::npos;
         pos = head.find(prefix, pos + 1)) {
      const bool at_boundary =
          pos == 0 ||
          (pos >= cfg.turn_separator.size() &&
           head.compare(pos - cfg.turn_separator.size(),
                        cfg.turn_separator.size(), cfg.turn_separator) == 0);
      if (at_boundary) boundaries.push_back({pos, prefix.size(), speaker});
    }
  }
  std::sort(boundaries.begin(), boundaries.end(),
            [](const Boundary& a, const Boundary& b) { return a.pos < b.pos; });

  if (boundaries.empty() || boundaries.front().pos != 0) {
    if (warnings) {
      warnings->push_back("context does not start with a known speaker "
                          "prefix; treating leading text as a user turn");
    }
    if (!boundaries.empty()) {
      // leading prefix-less text becomes its own user turn
      std::string text = head.substr(0, boundaries.front().pos);
      while (!text.empty() && text.back() == ' ') text.pop_back();
      if (!text.empty()) {
        inst.context.push_back({Speaker::User, text, {}, {}});
      }
    } else {
      inst.context.push_back({Speaker::User, head, {}, {}});
      return inst;
    }
  }

  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    const std::size_t text_begin = boundaries[i].pos + boundaries[i].prefix_len;
    const std::size_t text_end = (i + 1 < boundaries.size())
                                     ? boundaries[i + 1].pos
                                     : head.size();
    std::string text = head.substr(text_begin, text_end - text_begin);
    // strip the single space after the prefix and the separator before the
    // next prefix
    if (!text.empty() && text.front() == ' ') text.erase(text.begin());
    if (i + 1 < boundaries.size() &&
        text.size() >= cfg.turn_separator.size() &&
        text.compare(text.size() - cfg.turn_separator.size(),
                     cfg.turn_separator.size(), cfg.turn_separator) == 0) {
      text.resize(text.size() - cfg.turn_separator.size());
    }
    inst.context.push_back({boundaries[i].speaker, text, {}, {}});
  }
  return inst;
}

}  // namespace geval
