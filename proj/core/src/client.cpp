#include "geval/client.hpp"

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace geval {

using nlohmann::json;

namespace {

void configure(httplib::Client& http, const std::chrono::milliseconds timeout) {
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
      timeout - secs);
  http.set_connection_timeout(secs.count(), usecs.count());
  http.set_read_timeout(secs.count(), usecs.count());
}

// POST with retry + exponential backoff; returns body or error message.
struct PostResult {
  bool ok = false;
  std::string body;
  std::string error;
};

PostResult post_with_retry(httplib::Client& http, const std::string& path,
                           const std::string& body,
                           const ClientConfig& client) {
  auto backoff = client.initial_backoff;
  PostResult result;
  for (int attempt = 0; attempt <= client.retry_budget; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = http.Post(path, body, "application/json");
    if (res && res->status == 200) {
      result.ok = true;
      result.body = res->body;
      return result;
    }
    result.error = res ? "http status " + std::to_string(res->status)
                       : "transport error: " + httplib::to_string(res.error());
    // 4xx is not transient; do not burn the retry budget on it
    if (res && res->status >= 400 && res->status < 500) break;
  }
  return result;
}

}  // namespace

std::vector<SystemOutput> generate_batch(
    const std::vector<GroundedInstance>& instances,
    const std::string& endpoint, const DecodeConfig& decode,
    const WireFormatConfig& wire, const ClientConfig& client) {
  std::vector<SystemOutput> outputs(instances.size());
  if (instances.empty()) return outputs;

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> reached{0};

  auto worker = [&]() {
    httplib::Client http(endpoint);
    configure(http, decode.timeout);
    for (std::size_t i = next.fetch_add(1); i < instances.size();
         i = next.fetch_add(1)) {
      const GroundedInstance& inst = instances[i];
      SystemOutput& out = outputs[i];
      out.instance_id = inst.instance_id;
      out.reference = inst.target;
      if (!inst.environment.empty()) out.knowledge = {inst.environment};

      json context = json::array();
      for (const auto& turn : inst.context) {
        context.push_back(
            {{"speaker", speaker_name(turn.speaker)}, {"text", turn.text}});
      }
      json request = {
          {"instance",
           {{"flat", serialize_instance(inst, wire)},
            {"context", std::move(context)},
            {"environment", inst.environment}}},
          {"decode",
           {{"beam_size", decode.beam_size},
            {"max_new_tokens", decode.max_new_tokens}}}};

      const PostResult res =
          post_with_retry(http, "/generate", request.dump(), client);
      if (!res.ok) {
        out.error = res.error;
        continue;
      }
      json reply = json::parse(res.body, nullptr, false);
      if (reply.is_discarded() || !reply.contains("text")) {
        out.error = "malformed service response";
        continue;
      }
      out.hypothesis = reply.at("text").get<std::string>();
      ++reached;
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(
      client.max_in_flight, static_cast<unsigned>(instances.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  if (reached == 0) throw ServiceUnreachable(endpoint);
  return outputs;
}

std::map<std::string, double> neural_score_batch(
    const std::vector<SystemOutput>& outputs, const std::string& endpoint,
    const std::string& metric_name, const ClientConfig& client) {
  json items = json::array();
  for (const auto& out : outputs) {
    items.push_back({{"instance_id", out.instance_id},
                     {"hypothesis", out.hypothesis},
                     {"reference", out.reference}});
  }
  json request = {{"metric", metric_name}, {"items", std::move(items)}};

  httplib::Client http(endpoint);
  configure(http, std::chrono::milliseconds(60000));
  const PostResult res =
      post_with_retry(http, "/score", request.dump(), client);
  if (!res.ok) throw ServiceUnreachable(endpoint);

  json reply = json::parse(res.body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("scores")) {
    throw ServiceUnreachable(endpoint);
  }
  std::map<std::string, double> scores;
  for (const auto& item : reply.at("scores")) {
    scores[item.at("instance_id").get<std::string>()] =
        item.at("score").get<double>();
  }
  return scores;
}

}  // namespace geval
