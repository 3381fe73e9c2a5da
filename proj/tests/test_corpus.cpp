#include <doctest.h>

#include "geval/corpus.hpp"

using namespace geval;

namespace {

GroundedInstance make_instance(const std::string& id,
                               std::vector<DialogTurn> context,
                               const std::string& target) {
  GroundedInstance inst;
  inst.instance_id = id;
  inst.context = std::move(context);
  inst.target = target;
  return inst;
}

Corpus well_formed() {
  Corpus corpus;
  Dialog d1;
  d1.dialog_id = "d1";
  d1.instances.push_back(make_instance(
      "d1#0", {{Speaker::User, "hi there", {}, {}}}, "hello"));
  d1.instances.push_back(make_instance(
      "d1#1",
      {{Speaker::User, "hi there", {}, {}},
       {Speaker::System, "hello", {}, {}},
       {Speaker::User, "how are you", {}, {}}},
      "fine thanks"));
  Dialog d2;
  d2.dialog_id = "d2";
  d2.instances.push_back(make_instance(
      "d2#0", {{Speaker::User, "what time is it", {}, {}}}, "noon"));
  corpus.dialogs = {d1, d2};
  return corpus;
}

}  // namespace

TEST_CASE("well-formed corpus has no violations") {
  CHECK(validate_corpus(well_formed()).empty());
}

TEST_CASE("duplicate instance_id is reported by id") {
  Corpus corpus = well_formed();
  corpus.dialogs[1].instances[0].instance_id = "d1#0";
  const auto violations = validate_corpus(corpus);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("d1#0") != std::string::npos);
}

TEST_CASE("context not extending its predecessor is an ordering violation") {
  Corpus corpus = well_formed();
  // second instance forgets the first exchange
  corpus.dialogs[0].instances[1].context = {
      {Speaker::User, "how are you", {}, {}}};
  const auto violations = validate_corpus(corpus);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("does not extend") != std::string::npos);
}

TEST_CASE("blank turn text and non-user final turn are flagged") {
  Corpus corpus = well_formed();
  corpus.dialogs[1].instances[0].context = {
      {Speaker::User, "  ", {}, {}}};
  auto violations = validate_corpus(corpus);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("blank") != std::string::npos);

  corpus = well_formed();
  corpus.dialogs[1].instances[0].context = {
      {Speaker::System, "unprompted", {}, {}}};
  violations = validate_corpus(corpus);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("not the user") != std::string::npos);
}

TEST_CASE("validation is deterministic") {
  Corpus corpus = well_formed();
  corpus.dialogs[0].instances[0].instance_id = "dup";
  corpus.dialogs[1].instances[0].instance_id = "dup";
  CHECK(validate_corpus(corpus) == validate_corpus(corpus));
}
