// Flat training-text format: speaker-prefixed context turns, an optional
// environment section, "=>", then the target response. One instance per
// line, UTF-8, LF.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "geval/corpus.hpp"

namespace geval {

struct WireFormatConfig {
  std::string env_marker = "<|environment|>";
  std::string target_marker = "=>";
  std::map<Speaker, std::string> turn_prefixes = {
      {Speaker::User, "User :"}, {Speaker::System, "System :"}};
  std::string turn_separator = " ";
};

struct MarkerCollision : std::runtime_error {
  explicit MarkerCollision(const std::string& what)
      : std::runtime_error(what) {}
};
struct MalformedLine : std::runtime_error {
  explicit MalformedLine(const std::string& what) : std::runtime_error(what) {}
};

std::string serialize_instance(const GroundedInstance& instance,
                               const WireFormatConfig& cfg = {});

// Inverse of serialize_instance under the same config. instance_id is
// regenerated; *warnings (when non-null) collects prefix-detection notes.
GroundedInstance parse_instance(const std::string& line,
                                const WireFormatConfig& cfg = {},
                                std::vector<std::string>* warnings = nullptr);

}  // namespace geval
