#include <doctest.h>

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "injectbench/corpus.hpp"
#include "injectbench/datagen.hpp"
#include "injectbench/errors.hpp"
#include "injectbench/mock_services.hpp"

using namespace injectbench;

namespace {

corpus::Chunk chunk(const std::string& id, const std::string& text) {
  return {id, text, static_cast<int>(corpus::count_tokens(text)),
          {"src", 0}, corpus::Topic::current_events};
}

std::vector<corpus::Chunk> chunk_row(int n) {
  std::vector<corpus::Chunk> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(chunk("c" + std::to_string(i),
                        "The committee announced decision " + std::to_string(i) +
                            " after a long debate."));
  }
  return out;
}

}  // namespace

TEST_CASE("generate_questions yields four candidates, two selected, pending review") {
  modelio::MockCompletionService svc(17);
  auto set = datagen::generate_questions(chunk("art#3", "A very detailed passage."), svc, 42);

  CHECK(set.source_chunk == "art#3");
  REQUIRE(set.candidates.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(set.candidates[i].question_id == "art#3/q" + std::to_string(i + 1));
    CHECK_NOTHROW(evaluation::validate_question(set.candidates[i]));
    CHECK(set.candidates[i].options.size() == 4);
  }
  REQUIRE(set.selected.size() == 2);
  CHECK(set.selected[0] != set.selected[1]);
  std::set<std::string> ids;
  for (const auto& c : set.candidates) ids.insert(c.question_id);
  for (const auto& s : set.selected) CHECK(ids.count(s) == 1);
  CHECK(set.review_status == datagen::ReviewStatus::pending);
}

TEST_CASE("generate_questions is deterministic in (chunk, seed)") {
  modelio::MockCompletionService a(17), b(17);
  auto c = chunk("x#0", "Some passage text.");
  auto s1 = datagen::generate_questions(c, a, 42);
  auto s2 = datagen::generate_questions(c, b, 42);
  REQUIRE(s1.candidates.size() == s2.candidates.size());
  for (std::size_t i = 0; i < s1.candidates.size(); ++i) {
    CHECK(s1.candidates[i].stem == s2.candidates[i].stem);
    CHECK(s1.candidates[i].correct_index == s2.candidates[i].correct_index);
  }
  CHECK(s1.selected == s2.selected);

  auto s3 = datagen::generate_questions(c, a, 43);
  CHECK(s1.candidates[0].stem != s3.candidates[0].stem);
}

TEST_CASE("generate_questions surfaces malformed payloads with the raw body") {
  modelio::MockCompletionService svc(1);
  svc.set_fixed_output("{\"nothing\": true}");
  auto c = chunk("x#1", "text");
  try {
    datagen::generate_questions(c, svc, 1);
    FAIL("expected PayloadError");
  } catch (const PayloadError& e) {
    CHECK(e.raw_payload() == "{\"nothing\": true}");
  }

  // Three candidates instead of four.
  svc.set_fixed_output(
      R"({"questions":[)"
      R"({"question":"A?","options":["1","2","3","4"],"correct":0},)"
      R"({"question":"B?","options":["1","2","3","4"],"correct":1},)"
      R"({"question":"C?","options":["1","2","3","4"],"correct":2}]})");
  CHECK_THROWS_WITH_AS(datagen::generate_questions(c, svc, 1),
                       doctest::Contains("candidate count 3"), PayloadError);

  svc.set_fixed_output("not json at all");
  CHECK_THROWS_AS(datagen::generate_questions(c, svc, 1), PayloadError);
}

TEST_CASE("generate_paraphrases collects n distinct texts with recorded seeds") {
  modelio::MockCompletionService svc(9);
  auto c = chunk("p#0", "Original paragraph about events.");
  auto set = datagen::generate_paraphrases(c, 3, svc, 5);
  CHECK(set.source_chunk == "p#0");
  REQUIRE(set.paraphrases.size() == 3);
  REQUIRE(set.seeds.size() == 3);
  std::set<std::string> uniq(set.paraphrases.begin(), set.paraphrases.end());
  CHECK(uniq.size() == 3);
  for (const auto& p : set.paraphrases) CHECK(p != c.text);

  modelio::MockCompletionService svc2(9);
  auto again = datagen::generate_paraphrases(c, 3, svc2, 5);
  CHECK(again.paraphrases == set.paraphrases);
  CHECK(again.seeds == set.seeds);
}

TEST_CASE("generate_paraphrases gives up after the attempt budget") {
  modelio::MockCompletionService svc(9);
  svc.set_fixed_output(R"({"paraphrases":["always the same text"]})");
  auto c = chunk("p#1", "Original.");
  CHECK_THROWS_WITH_AS(datagen::generate_paraphrases(c, 2, svc, 5),
                       doctest::Contains("collected 1 of 2"), ServiceError);

  // Echoes of the source never count as paraphrases.
  svc.set_fixed_output(R"({"paraphrases":["Original."]})");
  CHECK_THROWS_WITH_AS(datagen::generate_paraphrases(c, 1, svc, 5),
                       doctest::Contains("collected 0 of 1"), ServiceError);

  CHECK_THROWS_AS(datagen::generate_paraphrases(c, 0, svc, 5), ValidationError);
}

TEST_CASE("make_validation_split samples deterministically without replacement") {
  auto chunks = chunk_row(12);
  modelio::MockCompletionService svc(3);
  auto split = datagen::make_validation_split(chunks, 5, 2, svc, 77);
  REQUIRE(split.size() == 5);
  std::set<std::string> ids;
  for (const auto& s : split) {
    REQUIRE(s.paraphrases.size() == 2);
    ids.insert(s.source_chunk);
  }
  CHECK(ids.size() == 5);  // no chunk sampled twice

  modelio::MockCompletionService svc2(3);
  auto split2 = datagen::make_validation_split(chunks, 5, 2, svc2, 77);
  for (std::size_t i = 0; i < split.size(); ++i) {
    CHECK(split2[i].source_chunk == split[i].source_chunk);
    CHECK(split2[i].paraphrases == split[i].paraphrases);
  }

  modelio::MockCompletionService svc3(3);
  auto other_seed = datagen::make_validation_split(chunks, 5, 2, svc3, 78);
  bool same_selection = true;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (other_seed[i].source_chunk != split[i].source_chunk) same_selection = false;
  }
  CHECK_FALSE(same_selection);

  CHECK_THROWS_AS(datagen::make_validation_split(chunks, 13, 2, svc, 1), ValidationError);
  CHECK_THROWS_AS(datagen::make_validation_split(chunks, 3, 0, svc, 1), ValidationError);
}

TEST_CASE("export_approved emits two questions per approved set only") {
  modelio::MockCompletionService svc(4);
  std::vector<datagen::GeneratedQuestionSet> sets;
  for (int i = 0; i < 5; ++i) {
    sets.push_back(datagen::generate_questions(
        chunk("e#" + std::to_string(i), "Passage " + std::to_string(i) + "."), svc, i));
  }
  sets[0].review_status = datagen::ReviewStatus::approved;
  sets[2].review_status = datagen::ReviewStatus::approved;
  sets[3].review_status = datagen::ReviewStatus::rejected;
  sets[4].review_status = datagen::ReviewStatus::approved;

  auto questions = datagen::export_approved(sets);
  REQUIRE(questions.size() == 6);  // 3 approved sets x 2 selected
  for (const auto& q : questions) CHECK_NOTHROW(evaluation::validate_question(q));

  sets[0].selected[1] = "e#0/q9";  // id that no candidate carries
  CHECK_THROWS_AS(datagen::export_approved(sets), ValidationError);
}

TEST_CASE("question sets and paraphrase sets round-trip through files") {
  modelio::MockCompletionService svc(6);
  std::vector<datagen::GeneratedQuestionSet> sets{
      datagen::generate_questions(chunk("r#0", "Round trip passage."), svc, 1)};
  sets[0].review_status = datagen::ReviewStatus::approved;

  auto dir = std::filesystem::temp_directory_path() / "injectbench-datagen-tests";
  std::filesystem::create_directories(dir);
  auto qpath = dir / "sets.jsonl";
  datagen::write_question_sets(qpath, sets, R"({"_header":{}})");
  auto back = datagen::read_question_sets(qpath);
  REQUIRE(back.size() == 1);
  CHECK(back[0].source_chunk == sets[0].source_chunk);
  CHECK(back[0].review_status == datagen::ReviewStatus::approved);
  CHECK(back[0].selected == sets[0].selected);
  REQUIRE(back[0].candidates.size() == 4);
  CHECK(back[0].candidates[2].stem == sets[0].candidates[2].stem);

  auto c = chunk("r#1", "Another passage.");
  std::vector<datagen::ParaphraseSet> psets{
      datagen::generate_paraphrases(c, 2, svc, 3)};
  auto ppath = dir / "paras.jsonl";
  datagen::write_paraphrase_sets(ppath, psets);
  auto pback = datagen::read_paraphrase_sets(ppath);
  REQUIRE(pback.size() == 1);
  CHECK(pback[0].source_chunk == psets[0].source_chunk);
  CHECK(pback[0].paraphrases == psets[0].paraphrases);
  CHECK(pback[0].seeds == psets[0].seeds);
}

TEST_CASE("review status names round-trip") {
  using datagen::ReviewStatus;
  for (auto s : {ReviewStatus::pending, ReviewStatus::approved, ReviewStatus::rejected}) {
    CHECK(datagen::parse_review_status(datagen::review_status_name(s)) == s);
  }
  CHECK_THROWS_AS(datagen::parse_review_status("maybe"), ValidationError);
}
