// Microbenchmarks for the hot paths: exact top-K search over growing
// index sizes, text cleaning/tokenization, and training-block assembly.
// Run with --benchmark_filter=... to narrow; results are wall-clock and
// depend on the host, so treat them as relative signals only.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "injectbench/corpus.hpp"
#include "injectbench/ftprep.hpp"
#include "injectbench/mock_services.hpp"
#include "injectbench/retrieval.hpp"
#include "injectbench/tokenizer.hpp"
#include "injectbench/util.hpp"

using namespace injectbench;

namespace {

retrieval::VectorIndex make_index(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(42);
  std::vector<retrieval::VectorIndex::Entry> entries;
  entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Embedding e;
    e.v.resize(dim);
    for (auto& x : e.v) x = 2.0 * util::unit_real(rng) - 1.0;
    entries.push_back({"c" + std::to_string(i), std::move(e)});
  }
  return retrieval::VectorIndex(std::move(entries), "bench/" + std::to_string(dim));
}

Embedding make_query(std::size_t dim) {
  std::mt19937_64 rng(7);
  Embedding q;
  q.v.resize(dim);
  for (auto& x : q.v) x = 2.0 * util::unit_real(rng) - 1.0;
  return q;
}

std::string sample_paragraph() {
  std::string raw;
  for (int i = 0; i < 40; ++i) {
    raw += "The <b>quick</b> brown fox [12] jumps over the lazy dog near "
           "https://example.org/path while {{cite web|x=1}} observers watch. ";
  }
  return raw;
}

void BM_TopK(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto index = make_index(n, 64);
  const auto query = make_query(64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(retrieval::top_k(index, query, 5));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_TopK)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_BuildIndex(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<corpus::Chunk> chunks;
  chunks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    chunks.push_back({"c" + std::to_string(i), "chunk text number " + std::to_string(i), 4,
                      {"s", 0}, corpus::Topic::current_events});
  }
  modelio::MockEmbeddingService embedder(64, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(retrieval::build_index(chunks, embedder, "mock/64", {4, 64}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BuildIndex)->Arg(256)->Arg(2048);

void BM_CleanText(benchmark::State& state) {
  const std::string raw = sample_paragraph();
  for (auto _ : state) {
    benchmark::DoNotOptimize(corpus::clean_text(raw));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(raw.size()));
}
BENCHMARK(BM_CleanText);

void BM_Tokenize(benchmark::State& state) {
  const std::string text = corpus::clean_text(sample_paragraph());
  for (auto _ : state) {
    benchmark::DoNotOptimize(corpus::tokenize(text));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Tokenize);

void BM_Rechunk(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::string> stream(n);
  for (std::size_t i = 0; i < n; ++i) stream[i] = "tok" + std::to_string(i % 997);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ftprep::rechunk(stream, 256));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Rechunk)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
