// HTTP client for an external response-generation service and an optional
// neural-scoring service. Requests carry both the flat training-format
// string and the structured fields; the service picks one.
//
// Wire protocol (UTF-8 JSON bodies):
//   POST /generate
//     {"instance": {"flat": ..., "context": [{"speaker","text"}],
//                   "environment": ...},
//      "decode": {"beam_size", "max_new_tokens"}}
//     -> {"text": ..., "model_tag": ...}
//   POST /score
//     {"metric": ..., "items": [{"instance_id","hypothesis","reference"}]}
//     -> {"scores": [{"instance_id","score"}]}
#pragma once

#include <chrono>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "geval/corpus.hpp"
#include "geval/wire.hpp"

namespace geval {

struct DecodeConfig {
  int beam_size = 5;
  int max_new_tokens = 128;
  std::chrono::milliseconds timeout{60000};
};

struct ClientConfig {
  int retry_budget = 3;
  std::chrono::milliseconds initial_backoff{250};  // doubles per retry
  unsigned max_in_flight = 8;
};

struct ServiceUnreachable : std::runtime_error {
  explicit ServiceUnreachable(const std::string& endpoint)
      : std::runtime_error("service unreachable: " + endpoint) {}
};

// One SystemOutput per instance, input order preserved. Per-instance
// failures surface as a non-empty `error` marker, never a dropped entry.
std::vector<SystemOutput> generate_batch(
    const std::vector<GroundedInstance>& instances,
    const std::string& endpoint, const DecodeConfig& decode,
    const WireFormatConfig& wire = {}, const ClientConfig& client = {});

// Scores from an external neural metric service. Throws ServiceUnreachable
// when nothing answers; callers treat that as "lexical-only report".
std::map<std::string, double> neural_score_batch(
    const std::vector<SystemOutput>& outputs, const std::string& endpoint,
    const std::string& metric_name, const ClientConfig& client = {});

}  // namespace geval
