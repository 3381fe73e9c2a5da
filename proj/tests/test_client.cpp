#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "geval/client.hpp"
#include "geval/lexical.hpp"

using namespace geval;
using nlohmann::json;

namespace {

// In-process stub service; handler maps the parsed request to a reply body.
class StubService {
 public:
  using Handler = std::function<void(const httplib::Request&,
                                     httplib::Response&)>;

  explicit StubService(Handler generate) {
    server_.Post("/generate", std::move(generate));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void set_score_handler(Handler h) { server_.Post("/score", std::move(h)); }

  ~StubService() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_);
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::vector<GroundedInstance> make_instances(int n) {
  std::vector<GroundedInstance> instances;
  for (int i = 0; i < n; ++i) {
    GroundedInstance inst;
    inst.instance_id = "i" + std::to_string(i);
    inst.context = {{Speaker::User, "question " + std::to_string(i), {}, {}}};
    inst.environment = "fact " + std::to_string(i);
    inst.target = "the answer to question " + std::to_string(i) + " follows";
    instances.push_back(inst);
  }
  return instances;
}

}  // namespace

TEST_CASE("echo stub returns the serialized flat instance") {
  StubService stub([](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    res.set_content(
        json{{"text", body.at("instance").at("flat").get<std::string>()},
             {"model_tag", "echo"}}
            .dump(),
        "application/json");
  });
  const auto instances = make_instances(3);
  const auto outputs = generate_batch(instances, stub.endpoint(), {});
  REQUIRE(outputs.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(outputs[i].instance_id == instances[i].instance_id);
    CHECK(outputs[i].hypothesis == serialize_instance(instances[i]));
    CHECK(outputs[i].error.empty());
  }
}

TEST_CASE("target-echo stub drives all lexical metrics to 1") {
  StubService stub([](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    // reply with the reference by parsing it back out of the flat string
    const auto flat = body.at("instance").at("flat").get<std::string>();
    const auto target = flat.substr(flat.find(" => ") + 4);
    res.set_content(json{{"text", target}, {"model_tag", "oracle"}}.dump(),
                    "application/json");
  });
  const auto instances = make_instances(5);
  const auto outputs = generate_batch(instances, stub.endpoint(), {});
  const MetricReport report = score_outputs(outputs);
  CHECK(report.corpus.at("bleu4") == doctest::Approx(1.0));
  CHECK(report.corpus.at("unigram_f1") == doctest::Approx(1.0));
  CHECK(report.corpus.at("chrf") == doctest::Approx(1.0));
}

TEST_CASE("partial failure keeps order and marks the failed instance") {
  StubService stub([](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    const auto flat = body.at("instance").at("flat").get<std::string>();
    if (flat.find("question 2") != std::string::npos) {
      res.status = 422;  // non-transient failure for exactly one instance
      return;
    }
    res.set_content(json{{"text", "ok"}, {"model_tag", "t"}}.dump(),
                    "application/json");
  });
  const auto instances = make_instances(5);
  const auto outputs = generate_batch(instances, stub.endpoint(), {});
  REQUIRE(outputs.size() == 5);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(outputs[i].instance_id == instances[i].instance_id);
    if (!outputs[i].error.empty()) ++failures;
  }
  CHECK(failures == 1);
  CHECK_FALSE(outputs[2].error.empty());
}

TEST_CASE("unreachable generation service throws") {
  ClientConfig fast;
  fast.retry_budget = 0;
  fast.initial_backoff = std::chrono::milliseconds(1);
  DecodeConfig decode;
  decode.timeout = std::chrono::milliseconds(500);
  CHECK_THROWS_AS(generate_batch(make_instances(2), "http://127.0.0.1:9",
                                 decode, {}, fast),
                  ServiceUnreachable);
}

TEST_CASE("output order matches input order under concurrency") {
  std::atomic<int> counter{0};
  StubService stub([&](const httplib::Request& req, httplib::Response& res) {
    // stagger completions so completion order differs from arrival order
    if (counter.fetch_add(1) % 3 == 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(30));
    }
    const json body = json::parse(req.body);
    res.set_content(
        json{{"text", body.at("instance").at("flat").get<std::string>()},
             {"model_tag", "t"}}
            .dump(),
        "application/json");
  });
  const auto instances = make_instances(24);
  ClientConfig cfg;
  cfg.max_in_flight = 8;
  const auto outputs = generate_batch(instances, stub.endpoint(), {}, {}, cfg);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    CHECK(outputs[i].instance_id == instances[i].instance_id);
  }
}

TEST_CASE("neural scorer: constant scores, unreachable isolation, F1 parity") {
  StubService stub([](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"text", "x"}}.dump(), "application/json");
  });
  stub.set_score_handler(
      [](const httplib::Request& req, httplib::Response& res) {
        const json body = json::parse(req.body);
        json scores = json::array();
        for (const auto& item : body.at("items")) {
          const double f1 =
              unigram_f1(item.at("hypothesis").get<std::string>(),
                         item.at("reference").get<std::string>(), {});
          scores.push_back(
              {{"instance_id", item.at("instance_id")}, {"score", f1}});
        }
        res.set_content(json{{"scores", scores}}.dump(), "application/json");
      });

  std::vector<SystemOutput> outputs = {
      {"a", "the same text", "the same text", {}, ""},
      {"b", "completely different", "nothing shared", {}, ""}};
  const auto scores =
      neural_score_batch(outputs, stub.endpoint(), "stub_f1");
  REQUIRE(scores.size() == 2);
  CHECK(scores.at("a") ==
        doctest::Approx(unigram_f1("the same text", "the same text", {})));
  CHECK(scores.at("b") == doctest::Approx(0.0));

  ClientConfig fast;
  fast.retry_budget = 0;
  CHECK_THROWS_AS(
      neural_score_batch(outputs, "http://127.0.0.1:9", "m", fast),
      ServiceUnreachable);
}
