#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "injectbench/corpus.hpp"
#include "injectbench/errors.hpp"

using namespace injectbench;
namespace fs = std::filesystem;

namespace {
fs::path temp_file(const char* name) {
  auto p = fs::temp_directory_path() / "injectbench-corpus-tests";
  fs::create_directories(p);
  return p / name;
}
}  // namespace

TEST_CASE("clean_text strips markup, urls and reference markers") {
  CHECK(corpus::clean_text("<b>Bold</b> see https://x.y") == "Bold see");
  CHECK(corpus::clean_text("Fact.[12] More.[citation needed] End.[note 3]") ==
        "Fact. More. End.");
  CHECK(corpus::clean_text("keep {{Infobox|x=1}} going") == "keep going");
  CHECK(corpus::clean_text("a <!-- hidden\ncomment --> b") == "a b");
  CHECK(corpus::clean_text("visit www.example.com/page now") == "visit now");
}

TEST_CASE("clean_text drops table lines and converts headings") {
  const std::string raw =
      "== History ==\n"
      "{| class=\"wikitable\"\n"
      "! Year !! Event\n"
      "| 1969 || Landing\n"
      "|}\n"
      "The mission landed.";
  CHECK(corpus::clean_text(raw) == "History: The mission landed.");
}

TEST_CASE("clean_text decodes entities without re-creating tags") {
  CHECK(corpus::clean_text("Tom &amp; Jerry") == "Tom & Jerry");
  CHECK(corpus::clean_text("&quot;quoted&quot; and &#39;single&#39;") ==
        "\"quoted\" and 'single'");
  // A tag smuggled through entity encoding must not survive decoding.
  std::string smuggled = corpus::clean_text("&amp;lt;script&amp;gt; x");
  CHECK(smuggled.find('<') == std::string::npos);
  CHECK(smuggled.find("script") != std::string::npos);
}

TEST_CASE("clean_text collapses whitespace and trims") {
  CHECK(corpus::clean_text("  a \t\t b  \n\n c  ") == "a b c");
  CHECK(corpus::clean_text("") == "");
  CHECK(corpus::clean_text(" \n ") == "");
}

TEST_CASE("clean_text is idempotent on varied inputs") {
  const std::string samples[] = {
      "<div>nested <span>tags</span></div> tail",
      "{{a{{b}}c}} deep templates",
      "mixed == H == \n | table \n text https://u.v/w?x=1 end",
      "&amp;amp; double encoded",
  };
  for (const auto& s : samples) {
    std::string once = corpus::clean_text(s);
    CHECK(corpus::clean_text(once) == once);
  }
}

TEST_CASE("clean_article emits one chunk per non-empty section") {
  corpus::RawArticle a;
  a.source_id = "art-9";
  a.title = "T";
  a.sections = {"First part of the story.", "{| junk\n|}", "Second part here."};
  auto chunks = corpus::clean_article(a, corpus::Topic::astronomy);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].chunk_id == "art-9#0");
  CHECK(chunks[0].origin.section_index == 0);
  CHECK(chunks[1].chunk_id == "art-9#2");
  CHECK(chunks[1].origin.section_index == 2);
  CHECK(chunks[0].topic == corpus::Topic::astronomy);
  CHECK(chunks[0].token_count > 0);
}

TEST_CASE("filter_small keeps exactly the chunks at or above the floor") {
  corpus::RawArticle a;
  a.source_id = "s";
  a.sections = {"one two three four five", "tiny"};
  auto chunks = corpus::clean_article(a, corpus::Topic::anatomy);
  auto kept = corpus::filter_small(chunks, 5);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].chunk_id == "s#0");
  CHECK_THROWS_AS(corpus::filter_small(kept, 0), ValidationError);
}

TEST_CASE("topic names round-trip") {
  using corpus::Topic;
  for (Topic t : {Topic::anatomy, Topic::astronomy, Topic::college_biology,
                  Topic::college_chemistry, Topic::prehistory, Topic::current_events}) {
    CHECK(corpus::parse_topic(corpus::topic_key(t)) == t);
  }
  CHECK(corpus::topic_display(Topic::college_biology) == "College biology");
  CHECK_THROWS_AS(corpus::parse_topic("geology"), ValidationError);
}

TEST_CASE("corpus store rejects duplicate ids and finds by id") {
  corpus::CorpusStore store;
  store.add({"c1", "text one", 2, {"s", 0}, corpus::Topic::anatomy});
  store.add({"c2", "text two", 2, {"s", 1}, corpus::Topic::anatomy});
  CHECK(store.size() == 2);
  CHECK(store.contains("c1"));
  CHECK(store.by_id("c2").text == "text two");
  CHECK_THROWS_AS(store.add({"c1", "dup", 1, {"s", 2}, corpus::Topic::anatomy}),
                  ValidationError);
  CHECK_THROWS_AS(store.by_id("missing"), ValidationError);
}

TEST_CASE("chunk files round-trip and skip the header line") {
  std::vector<corpus::Chunk> chunks{
      {"a#0", "alpha beta", 2, {"a", 0}, corpus::Topic::prehistory},
      {"a#1", "gamma \"quoted\" text", 3, {"a", 1}, corpus::Topic::prehistory},
  };
  auto path = temp_file("chunks.jsonl");
  corpus::write_chunks(path, chunks, R"({"_header":{"harness_version":"x"}})");
  auto back = corpus::read_chunks(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].chunk_id == chunks[0].chunk_id);
  CHECK(back[1].text == chunks[1].text);
  CHECK(back[1].origin.section_index == 1);
  CHECK(back[1].topic == corpus::Topic::prehistory);
}

TEST_CASE("malformed chunk lines report the line number") {
  auto path = temp_file("bad.jsonl");
  {
    std::ofstream out(path);
    out << R"({"chunk_id":"ok","text":"t","token_count":1,)"
        << R"("origin":{"source_id":"s","section_index":0},"topic":"anatomy"})"
        << "\nnot json\n";
  }
  CHECK_THROWS_WITH_AS(corpus::read_chunks(path), doctest::Contains(":2"),
                       ValidationError);
}
