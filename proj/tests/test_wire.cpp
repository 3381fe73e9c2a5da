#include <doctest.h>

#include <cstdint>
#include <string>

#include "geval/wire.hpp"

using namespace geval;

namespace {

// Figure-2-style sample instance used throughout.
GroundedInstance sample_instance() {
  GroundedInstance inst;
  inst.instance_id = "sample";
  inst.context = {
      {Speaker::User,
       "I would like to find an expensive restaurant that serves Chinese "
       "food.",
       {},
       {}},
      {Speaker::System, "sure, which area do you prefer ?", {}, {}},
      {Speaker::User, "Bellevue downtown.", {}, {}}};
  inst.environment =
      "Multiple expensive Chinese restaurants in Bellevue downtown.";
  inst.target =
      "There are multiple restaurants meet your requirement. peony kitchen "
      "is a great Chinese Restaurant. Would you like to book a table there?";
  return inst;
}

const std::string kSampleWire =
    "User : I would like to find an expensive restaurant that serves "
    "Chinese food. System : sure, which area do you prefer ? User : "
    "Bellevue downtown. <|environment|> Multiple expensive Chinese "
    "restaurants in Bellevue downtown. => There are multiple restaurants "
    "meet your requirement. peony kitchen is a great Chinese Restaurant. "
    "Would you like to book a table there?";

std::uint64_t splitmix(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t x = state;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// random marker-free text, mixing ascii words with some multibyte chars
std::string random_text(std::uint64_t& state) {
  static const char* words[] = {"hello",  "caf\xC3\xA9", "world", "b",
                                "restaurant", "\xE4\xBD\xA0\xE5\xA5\xBD",
                                "time",   "sure",        "ok?",   "yes!"};
  const std::size_t n = 1 + splitmix(state) % 8;
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out.push_back(' ');
    out += words[splitmix(state) % 10];
  }
  return out;
}

GroundedInstance random_instance(std::uint64_t& state) {
  GroundedInstance inst;
  const std::size_t turns = 1 + splitmix(state) % 3;
  for (std::size_t i = 0; i < 2 * turns - 1; ++i) {
    inst.context.push_back(
        {i % 2 == 0 ? Speaker::User : Speaker::System, random_text(state),
         {},
         {}});
  }
  if (splitmix(state) % 2) inst.environment = random_text(state);
  inst.target = random_text(state);
  return inst;
}

bool same_fields(const GroundedInstance& a, const GroundedInstance& b) {
  if (a.context.size() != b.context.size()) return false;
  for (std::size_t i = 0; i < a.context.size(); ++i) {
    if (!(a.context[i] == b.context[i])) return false;
  }
  return a.environment == b.environment && a.target == b.target;
}

}  // namespace

TEST_CASE("sample instance serializes to the exact flat string") {
  CHECK(serialize_instance(sample_instance()) == kSampleWire);
}

TEST_CASE("sample instance round-trips field-exactly") {
  const auto parsed = parse_instance(kSampleWire);
  CHECK(same_fields(parsed, sample_instance()));
}

TEST_CASE("empty environment omits the marker section") {
  GroundedInstance inst;
  inst.context = {{Speaker::User, "hi", {}, {}}};
  inst.target = "hello";
  CHECK(serialize_instance(inst) == "User : hi => hello");

  const auto parsed = parse_instance("User : hi => hello");
  REQUIRE(parsed.context.size() == 1);
  CHECK(parsed.context[0].text == "hi");
  CHECK(parsed.context[0].speaker == Speaker::User);
  CHECK(parsed.environment.empty());
  CHECK(parsed.target == "hello");
}

TEST_CASE("marker inside a text field is a collision") {
  GroundedInstance inst;
  inst.context = {{Speaker::User, "2 => 3", {}, {}}};
  inst.target = "ok";
  CHECK_THROWS_AS(serialize_instance(inst), MarkerCollision);

  inst.context = {{Speaker::User, "hi", {}, {}}};
  inst.target = "see <|environment|> there";
  CHECK_THROWS_AS(serialize_instance(inst), MarkerCollision);
}

TEST_CASE("parse rejects missing or ambiguous target markers") {
  CHECK_THROWS_AS(parse_instance("User : hi hello"), MalformedLine);
  CHECK_THROWS_AS(parse_instance("User : a => b => c"), MalformedLine);
}

TEST_CASE("serialized output contains the target marker exactly once") {
  std::uint64_t state = 7;
  for (int i = 0; i < 200; ++i) {
    const auto wire = serialize_instance(random_instance(state));
    std::size_t count = 0;
    for (std::size_t pos = wire.find("=>"); pos != std::string::npos;
         pos = wire.find("=>", pos + 2)) {
      ++count;
    }
    CHECK(count == 1);
  }
}

TEST_CASE("1000 fuzzed marker-free instances round-trip") {
  std::uint64_t state = 42;
  std::size_t ok = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto inst = random_instance(state);
    if (same_fields(parse_instance(serialize_instance(inst)), inst)) ++ok;
  }
  CHECK(ok == 1000);
}
