#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "geval/task.hpp"

using namespace geval;

namespace {

EntityDatabase restaurant_db() {
  EntityDatabase db;
  db.domains["restaurant"] = {
      {"peony kitchen", {{"phone", "555 1234"}, {"address", "12 main st"}}},
      {"golden dragon", {{"phone", "555 9876"}, {"address", "8 elm ave"}}},
      {"cheap eats", {{"phone", "555 0000"}, {"address", "1 low rd"}}}};
  return db;
}

GoalSpec restaurant_goal() {
  GoalSpec goal;
  goal.domain = "restaurant";
  goal.constraints = {{"food", "chinese"}, {"pricerange", "expensive"}};
  goal.requested = {"phone", "address"};
  goal.gold_entities = {"peony kitchen", "golden dragon"};
  return goal;
}

std::uint64_t splitmix(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t x = state;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

TEST_CASE("entity mention detection at token boundaries") {
  const auto db = restaurant_db();
  const auto found = mentioned_entities(
      {"peony kitchen is a great Chinese Restaurant"}, db, "restaurant");
  CHECK(found == std::set<std::string>{"peony kitchen"});

  CHECK(mentioned_entities({"nothing relevant here"}, db, "restaurant")
            .empty());
  CHECK_THROWS_AS(mentioned_entities({"x"}, db, "hotel"), UnknownDomain);

  // delexicalized placeholder acts as a wildcard
  const auto wild =
      mentioned_entities({"[restaurant_name] fits your needs"}, db,
                         "restaurant");
  CHECK(wild.count("*") == 1);
}

TEST_CASE("inform requires a gold entity mention") {
  const auto db = restaurant_db();
  DialogTranscript t;
  t.dialog_id = "d";
  t.goal = restaurant_goal();

  t.system_responses = {"how about golden dragon?"};
  CHECK(inform(t, db));

  t.system_responses = {"cheap eats is nice"};  // violates constraints
  CHECK_FALSE(inform(t, db));

  t.system_responses = {"[restaurant_name] fits"};
  CHECK(inform(t, db));

  // empty gold entities: vacuously informed (taxi-style goal)
  t.goal.gold_entities.clear();
  t.system_responses = {"your taxi is booked"};
  CHECK(inform(t, db));
}

TEST_CASE("success needs inform plus every requested slot value") {
  const auto db = restaurant_db();
  DialogTranscript t;
  t.dialog_id = "d";
  t.goal = restaurant_goal();

  // not informed -> not successful, slots irrelevant
  t.system_responses = {"their phone is 555 1234 and address 12 main st"};
  CHECK_FALSE(inform(t, db));
  CHECK_FALSE(success(t, db));

  // informed with all requested values
  t.system_responses = {
      "peony kitchen suits you; phone 555 1234, address 12 main st"};
  CHECK(success(t, db));

  // informed but address missing
  t.system_responses = {"peony kitchen suits you; phone 555 1234"};
  CHECK(inform(t, db));
  CHECK_FALSE(success(t, db));

  // delexicalized slot placeholders satisfy requested slots
  t.system_responses = {
      "[restaurant_name] has phone [restaurant_phone] at "
      "[restaurant_address]"};
  CHECK(success(t, db));
}

TEST_CASE("inform and success ignore response casing") {
  const auto db = restaurant_db();
  DialogTranscript t;
  t.dialog_id = "d";
  t.goal = restaurant_goal();
  t.system_responses = {"PEONY KITCHEN: phone 555 1234, ADDRESS 12 MAIN ST"};
  CHECK(inform(t, db));
  CHECK(success(t, db));
}

TEST_CASE("4-dialog fixture yields inform rate 0.75") {
  const auto db = restaurant_db();
  std::vector<DialogTranscript> transcripts;
  for (int i = 0; i < 3; ++i) {
    DialogTranscript t;
    t.dialog_id = "good" + std::to_string(i);
    t.goal = restaurant_goal();
    t.system_responses = {"try peony kitchen"};
    transcripts.push_back(t);
  }
  DialogTranscript bad;
  bad.dialog_id = "bad";
  bad.goal = restaurant_goal();
  bad.system_responses = {"try cheap eats"};
  transcripts.push_back(bad);

  const TaskMetrics m = evaluate_transcripts(transcripts, db);
  CHECK(m.inform_rate == doctest::Approx(0.75));
}

TEST_CASE("success implies inform on fuzzed transcripts") {
  const auto db = restaurant_db();
  static const char* snippets[] = {
      "try peony kitchen",      "try cheap eats",
      "phone 555 1234",         "address 12 main st",
      "[restaurant_name] fits", "[restaurant_phone]",
      "[restaurant_address]",   "no idea",
      "golden dragon is good",  "phone 555 9876"};
  std::uint64_t state = 11;
  for (int i = 0; i < 10000; ++i) {
    DialogTranscript t;
    t.dialog_id = "f";
    t.goal = restaurant_goal();
    if (splitmix(state) % 4 == 0) t.goal.gold_entities.clear();
    const std::size_t n = 1 + splitmix(state) % 3;
    for (std::size_t j = 0; j < n; ++j) {
      t.system_responses.push_back(snippets[splitmix(state) % 10]);
    }
    if (success(t, db)) CHECK(inform(t, db));
  }
}

TEST_CASE("combined score arithmetic") {
  CHECK(combined(0.6060, 0.2250, 0.0431) == doctest::Approx(45.86).epsilon(1e-9));
  // The published tables carry rounding slop: components shown to 2 decimals
  // do not exactly regenerate the shown combined score.
  CHECK(combined(0.6760, 0.4610, 0.1281) == doctest::Approx(69.66).epsilon(1e-9));
  CHECK(std::fabs(combined(0.6760, 0.4610, 0.1281) - 69.72) < 0.07);
  CHECK(combined(0.0, 0.0, 0.0) == doctest::Approx(0.0));
  CHECK(combined(0.5890, 0.0910, 0.0460) == doctest::Approx(38.60).epsilon(1e-9));
  CHECK(std::fabs(combined(0.5890, 0.0910, 0.0460) - 38.61) <= 0.01);
  CHECK(combined(1.0, 1.0, 1.0) == doctest::Approx(200.0));  // formula max
  CHECK_THROWS_AS(combined(1.2, 0.0, 0.0), OutOfRange);
}

TEST_CASE("combined is monotone in each argument") {
  std::uint64_t state = 3;
  for (int i = 0; i < 200; ++i) {
    const double a = static_cast<double>(splitmix(state) % 1000) / 1000.0;
    const double b = static_cast<double>(splitmix(state) % 1000) / 1000.0;
    const double c = static_cast<double>(splitmix(state) % 1000) / 1000.0;
    const double eps = 0.001;
    const double base = combined(a, b, c);
    if (a + eps <= 1.0) CHECK(combined(a + eps, b, c) >= base);
    if (b + eps <= 1.0) CHECK(combined(a, b + eps, c) >= base);
    if (c + eps <= 1.0) CHECK(combined(a, b, c + eps) >= base);
  }
}

TEST_CASE("missing goal is an error at the transcript level") {
  // MissingGoal surfaces where transcripts are assembled from dialogs; a
  // DialogTranscript always carries a goal by construction, so here we
  // just pin the vacuous-domain rule.
  EntityDatabase db;  // empty: no domains at all
  DialogTranscript t;
  t.dialog_id = "d";
  t.goal.domain = "police";
  t.system_responses = {"the police station is on main street"};
  CHECK(inform(t, db));  // no database for the domain -> vacuously informed
  CHECK(success(t, db));
}
