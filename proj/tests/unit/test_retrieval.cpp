#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "injectbench/corpus.hpp"
#include "injectbench/errors.hpp"
#include "injectbench/mock_services.hpp"
#include "injectbench/retrieval.hpp"
#include "injectbench/util.hpp"

using namespace injectbench;

namespace {

retrieval::VectorIndex make_index(std::vector<std::vector<double>> vectors) {
  std::vector<retrieval::VectorIndex::Entry> entries;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    entries.push_back({"c" + std::to_string(i), Embedding{std::move(vectors[i])}});
  }
  return retrieval::VectorIndex(std::move(entries), "test");
}

std::vector<corpus::Chunk> make_chunks(int n) {
  std::vector<corpus::Chunk> chunks;
  for (int i = 0; i < n; ++i) {
    chunks.push_back({"ch" + std::to_string(i), "text number " + std::to_string(i),
                      3, {"src", i}, corpus::Topic::astronomy});
  }
  return chunks;
}

}  // namespace

TEST_CASE("top_k ranks by dot product, ties to the lower insertion index") {
  auto index = make_index({{1.0, 0.0},    // c0: dot 1
                           {0.0, 1.0},    // c1: dot 0
                           {1.0, 0.0},    // c2: dot 1, tie with c0
                           {2.0, 0.0}});  // c3: dot 2
  Embedding q{{1.0, 0.0}};
  auto res = retrieval::top_k(index, q, 3);
  REQUIRE(res.hits.size() == 3);
  CHECK(res.hits[0].chunk_id == "c3");
  CHECK(res.hits[1].chunk_id == "c0");  // tie resolved to earlier entry
  CHECK(res.hits[2].chunk_id == "c2");
  CHECK(res.hits[0].score == doctest::Approx(2.0));
  CHECK(res.K == 3);
}

TEST_CASE("top_k edge cases: K=0, K beyond size, dim mismatch, negative K") {
  auto index = make_index({{1.0, 0.0}, {0.0, 1.0}});
  Embedding q{{1.0, 1.0}};
  CHECK(retrieval::top_k(index, q, 0).hits.empty());
  CHECK(retrieval::top_k(index, q, 10).hits.size() == 2);
  Embedding bad{{1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(retrieval::top_k(index, bad, 1), ValidationError);
  CHECK_THROWS_AS(retrieval::top_k(index, q, -1), ValidationError);
  retrieval::VectorIndex empty;
  CHECK(retrieval::top_k(empty, q, 3).hits.empty());
}

TEST_CASE("index construction validates entries") {
  CHECK_THROWS_AS(make_index({{1.0, 0.0}, {1.0}}), ValidationError);  // dim drift
  std::vector<retrieval::VectorIndex::Entry> dup{
      {"same", Embedding{{1.0}}}, {"same", Embedding{{2.0}}}};
  CHECK_THROWS_AS(retrieval::VectorIndex(std::move(dup), "x"), ValidationError);
  std::vector<retrieval::VectorIndex::Entry> inf{
      {"a", Embedding{{std::numeric_limits<double>::infinity()}}}};
  CHECK_THROWS_AS(retrieval::VectorIndex(std::move(inf), "x"), ValidationError);
}

TEST_CASE("build_index output is independent of workers and batch size") {
  auto chunks = make_chunks(23);
  modelio::MockEmbeddingService svc(16, 99);
  retrieval::BuildOptions base;
  auto reference = retrieval::build_index(chunks, svc, "e", base);

  for (int workers : {1, 4}) {
    for (int batch : {1, 3, 32}) {
      retrieval::BuildOptions opts;
      opts.workers = workers;
      opts.batch_size = batch;
      auto index = retrieval::build_index(chunks, svc, "e", opts);
      REQUIRE(index.size() == reference.size());
      for (std::size_t i = 0; i < index.size(); ++i) {
        CHECK(index.entries()[i].chunk_id == reference.entries()[i].chunk_id);
        CHECK(index.entries()[i].embedding.v == reference.entries()[i].embedding.v);
      }
    }
  }
}

TEST_CASE("build_index normalize makes dot products cosines") {
  auto chunks = make_chunks(5);
  modelio::MockEmbeddingService svc(8, 1);
  retrieval::BuildOptions opts;
  opts.normalize = true;
  auto index = retrieval::build_index(chunks, svc, "e", opts);
  for (const auto& e : index.entries()) {
    CHECK(std::abs(e.embedding.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("build_index rejects empty chunk text with the chunk id") {
  auto chunks = make_chunks(3);
  chunks[1].text = "";
  modelio::MockEmbeddingService svc(8, 1);
  CHECK_THROWS_WITH_AS(retrieval::build_index(chunks, svc, "e"),
                       doctest::Contains("ch1"), ValidationError);
}

TEST_CASE("serialization round-trips exactly and is stable") {
  auto chunks = make_chunks(9);
  modelio::MockEmbeddingService svc(24, 5);
  auto index = retrieval::build_index(chunks, svc, "embedder-v1");

  auto bytes = retrieval::serialize_index(index);
  REQUIRE(bytes.size() > 16);
  CHECK(bytes[0] == 'I');
  CHECK(bytes[1] == 'B');
  CHECK(bytes[2] == 'I');
  CHECK(bytes[3] == 'X');

  auto back = retrieval::deserialize_index(bytes);
  CHECK(back.embedder_id() == "embedder-v1");
  REQUIRE(back.size() == index.size());
  CHECK(back.dim() == index.dim());
  for (std::size_t i = 0; i < index.size(); ++i) {
    CHECK(back.entries()[i].chunk_id == index.entries()[i].chunk_id);
    CHECK(back.entries()[i].embedding.v == index.entries()[i].embedding.v);
  }
  CHECK(retrieval::serialize_index(back) == bytes);  // stable bytes

  auto path = std::filesystem::temp_directory_path() / "injectbench-index-test.bin";
  retrieval::save_index(index, path);
  auto loaded = retrieval::load_index(path);
  CHECK(retrieval::serialize_index(loaded) == bytes);
}

TEST_CASE("deserialize rejects corrupt input") {
  auto chunks = make_chunks(2);
  modelio::MockEmbeddingService svc(4, 2);
  auto bytes = retrieval::serialize_index(retrieval::build_index(chunks, svc, "e"));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(retrieval::deserialize_index(bad_magic), ValidationError);
  auto truncated = bytes;
  truncated.resize(truncated.size() / 2);
  CHECK_THROWS_AS(retrieval::deserialize_index(truncated), ValidationError);
}

TEST_CASE("dump_index emits one line per entry with norm and lead coords") {
  auto index = make_index({{3.0, 4.0}});
  auto dump = retrieval::dump_index(index);
  CHECK(dump == "c0 5.000000 3.000000 4.000000\n");
}

TEST_CASE("augment_query joins hit texts before the question") {
  corpus::CorpusStore store;
  store.add({"d1", "first document", 2, {"s", 0}, corpus::Topic::anatomy});
  store.add({"d2", "second document", 2, {"s", 1}, corpus::Topic::anatomy});
  retrieval::RetrievalResult hits;
  hits.hits = {{"d1", 0.9}, {"d2", 0.5}};
  hits.K = 2;
  CHECK(retrieval::augment_query("the question?", hits, store) ==
        "first document\n\nsecond document\n\nthe question?");

  retrieval::RetrievalResult none;
  CHECK(retrieval::augment_query("the question?", none, store) == "the question?");
}

TEST_CASE("augment_query skips hits with empty text") {
  retrieval::RetrievalResult hits;
  hits.hits = {{"gone", 0.9}, {"there", 0.5}};
  auto lookup = [](std::string_view id) -> std::string {
    return id == "there" ? "present text" : "";
  };
  CHECK(retrieval::augment_query("q", hits, lookup) == "present text\n\nq");
}

TEST_CASE("top_k agrees with a brute-force oracle on random corpora") {
  std::mt19937_64 rng(7777);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + util::bounded_rand(rng, 60);
    const std::size_t dim = 1 + util::bounded_rand(rng, 8);
    const int K = static_cast<int>(util::bounded_rand(rng, 12));

    std::vector<std::vector<double>> vecs(n);
    for (auto& v : vecs) {
      v.resize(dim);
      // Coarse grid so score ties happen often.
      for (auto& x : v) x = static_cast<double>(util::bounded_rand(rng, 5)) - 2.0;
    }
    Embedding q;
    q.v.resize(dim);
    for (auto& x : q.v) x = static_cast<double>(util::bounded_rand(rng, 5)) - 2.0;

    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0;
      for (std::size_t d = 0; d < dim; ++d) dot += vecs[i][d] * q.v[d];
      scores[i] = dot;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    auto index = make_index(vecs);
    auto res = retrieval::top_k(index, q, K);
    const std::size_t want = std::min<std::size_t>(K, n);
    REQUIRE(res.hits.size() == want);
    for (std::size_t i = 0; i < want; ++i) {
      CHECK(res.hits[i].chunk_id == "c" + std::to_string(order[i]));
      CHECK(res.hits[i].score == scores[order[i]]);
    }
  }
}
