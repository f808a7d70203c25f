#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "injectbench/errors.hpp"
#include "injectbench/ftprep.hpp"
#include "injectbench/util.hpp"

using namespace injectbench;
namespace fs = std::filesystem;

namespace {

corpus::Chunk chunk(const std::string& id, const std::string& text) {
  return {id, text, static_cast<int>(corpus::count_tokens(text)),
          {"src", 0}, corpus::Topic::prehistory};
}

datagen::ParaphraseSet parset(const std::string& id, std::vector<std::string> texts) {
  datagen::ParaphraseSet s;
  s.source_chunk = id;
  s.paraphrases = std::move(texts);
  s.seeds.assign(s.paraphrases.size(), 1);
  return s;
}

long count_token(const std::vector<std::string>& stream, std::string_view token) {
  return std::count(stream.begin(), stream.end(), std::string(token));
}

fs::path temp_dir() {
  auto p = fs::temp_directory_path() / "injectbench-ftprep-tests";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("build_stream wraps each document in boundary markers") {
  std::vector<corpus::Chunk> chunks{chunk("a", "one two three"), chunk("b", "four five")};
  std::vector<datagen::ParaphraseSet> sets{
      parset("a", {"eins zwei drei", "uno dos tres"}),
      parset("b", {"vier funf", "quatre cinq"}),
  };

  for (int n : {0, 1, 2}) {
    auto stream = ftprep::build_stream(chunks, sets, n);
    const long docs = static_cast<long>(1 + n) * 2;
    CHECK(count_token(stream, ftprep::kBosMarker) == docs);
    CHECK(count_token(stream, ftprep::kEosMarker) == docs);
    CHECK(stream.front() == ftprep::kBosMarker);
    CHECK(stream.back() == ftprep::kEosMarker);
  }

  auto stream = ftprep::build_stream(chunks, sets, 1);
  // First document reproduces the chunk's own tokens between markers.
  std::vector<std::string> head(stream.begin(), stream.begin() + 5);
  CHECK(head == std::vector<std::string>{"<BOS>", "one", "two", "three", "<EOS>"});
}

TEST_CASE("build_stream markers are single tokens, never re-tokenized") {
  std::vector<corpus::Chunk> chunks{chunk("a", "x")};
  auto stream = ftprep::build_stream(chunks, {}, 0);
  REQUIRE(stream.size() == 3);  // <BOS> x <EOS>: markers count toward the budget
  CHECK(stream[0] == "<BOS>");
  CHECK(stream[2] == "<EOS>");
}

TEST_CASE("build_stream validates the paraphrase supply and range") {
  std::vector<corpus::Chunk> chunks{chunk("a", "text here")};
  std::vector<datagen::ParaphraseSet> sets{parset("a", {"only one"})};
  CHECK_THROWS_WITH_AS(ftprep::build_stream(chunks, sets, 2),
                       doctest::Contains("has 1 paraphrases, need 2"), ValidationError);
  CHECK_THROWS_AS(ftprep::build_stream(chunks, sets, 11), ValidationError);
  CHECK_THROWS_AS(ftprep::build_stream(chunks, sets, -1), ValidationError);
  // Chunk with no paraphrase set at all.
  std::vector<corpus::Chunk> missing{chunk("zzz", "more text")};
  CHECK_THROWS_WITH_AS(ftprep::build_stream(missing, sets, 1),
                       doctest::Contains("has 0 paraphrases"), ValidationError);
}

TEST_CASE("rechunk cuts exact blocks and keeps the final partial") {
  std::vector<std::string> stream;
  for (int i = 0; i < 23; ++i) stream.push_back("t" + std::to_string(i));
  auto blocks = ftprep::rechunk(stream, 10);
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[0].tokens.size() == 10);
  CHECK(blocks[1].tokens.size() == 10);
  CHECK(blocks[2].tokens.size() == 3);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    CHECK(blocks[i].block_index == static_cast<int>(i));
  }
  CHECK_THROWS_AS(ftprep::rechunk(stream, 1), ValidationError);
  CHECK(ftprep::rechunk({}, 10).empty());
}

TEST_CASE("rechunk concatenation reproduces the stream on random inputs") {
  std::mt19937_64 rng(515);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t len = util::bounded_rand(rng, 400);
    std::vector<std::string> stream;
    stream.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
      stream.push_back("w" + std::to_string(util::bounded_rand(rng, 1000)));
    }
    const int block = 2 + static_cast<int>(util::bounded_rand(rng, 300));
    auto blocks = ftprep::rechunk(stream, block);

    std::vector<std::string> rejoined;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      REQUIRE(blocks[i].block_index == static_cast<int>(i));
      if (i + 1 < blocks.size()) {
        REQUIRE(blocks[i].tokens.size() == static_cast<std::size_t>(block));
      } else {
        REQUIRE(!blocks[i].tokens.empty());
        REQUIRE(blocks[i].tokens.size() <= static_cast<std::size_t>(block));
      }
      rejoined.insert(rejoined.end(), blocks[i].tokens.begin(), blocks[i].tokens.end());
    }
    REQUIRE(rejoined == stream);
  }
}

TEST_CASE("blocks round-trip through files with a marker sidecar") {
  std::vector<corpus::Chunk> chunks{chunk("a", "alpha beta gamma delta"),
                                    chunk("b", "epsilon zeta")};
  auto stream = ftprep::build_stream(chunks, {}, 0);
  auto blocks = ftprep::rechunk(stream, 4);

  auto path = temp_dir() / "blocks.jsonl";
  ftprep::write_blocks(path, blocks, R"({"_header":{}})");
  auto back = ftprep::read_blocks(path);
  REQUIRE(back.size() == blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    CHECK(back[i].tokens == blocks[i].tokens);
    CHECK(back[i].block_index == blocks[i].block_index);
  }

  auto sidecar = path.string() + ".markers.json";
  std::ifstream in(sidecar);
  REQUIRE(in);
  auto j = nlohmann::json::parse(in);
  CHECK(j.at("bos") == "<BOS>");
  CHECK(j.at("eos") == "<EOS>");
}

TEST_CASE("train config validates ranges and round-trips") {
  ftprep::TrainConfig cfg;
  cfg.dataset_path = "train.jsonl";
  CHECK_NOTHROW(ftprep::validate_train_config(cfg));
  cfg.learning_rate = 6e-5;
  CHECK_THROWS_AS(ftprep::validate_train_config(cfg), ValidationError);
  cfg.learning_rate = 5e-7;
  CHECK_THROWS_AS(ftprep::validate_train_config(cfg), ValidationError);
  cfg.learning_rate = 2e-5;
  cfg.epochs = 6;
  CHECK_THROWS_AS(ftprep::validate_train_config(cfg), ValidationError);
  cfg.epochs = 3;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(ftprep::validate_train_config(cfg), ValidationError);
  cfg.batch_size = 64;
  cfg.n_paraphrases = 7;

  auto path = temp_dir() / "train.config";
  ftprep::write_train_config(path, cfg);
  auto back = ftprep::read_train_config(path);
  CHECK(back.learning_rate == cfg.learning_rate);
  CHECK(back.epochs == cfg.epochs);
  CHECK(back.batch_size == cfg.batch_size);
  CHECK(back.dataset_path == cfg.dataset_path);
  CHECK(back.n_paraphrases == cfg.n_paraphrases);
}

TEST_CASE("sweep manifest dedups n values and names datasets by n") {
  ftprep::TrainConfig base;
  std::vector<int> ns{0, 2, 2, 10};
  std::vector<std::string> warnings;
  auto entries = ftprep::sweep_manifest(ns, "outdir", base, &warnings);
  REQUIRE(entries.size() == 3);
  CHECK(warnings.size() == 1);
  CHECK(entries[0].n_paraphrases == 0);
  CHECK(entries[1].n_paraphrases == 2);
  CHECK(entries[2].n_paraphrases == 10);
  CHECK(fs::path(entries[0].dataset_path).filename() == "train-par0.jsonl");
  CHECK(fs::path(entries[2].dataset_path).filename() == "train-par10.jsonl");
  CHECK(entries[1].config.n_paraphrases == 2);
  CHECK(entries[1].config.dataset_path == entries[1].dataset_path);

  CHECK_THROWS_AS(ftprep::sweep_manifest({}, "outdir", base, nullptr), ValidationError);
}
