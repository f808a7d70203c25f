#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "injectbench/modelio.hpp"

namespace injectbench::modelio {

/// Concurrency instrumentation shared by the mock services: proves the
/// callers' max_inflight discipline in tests.
struct MockStats {
  std::atomic<int> inflight{0};
  std::atomic<int> max_inflight_seen{0};
  std::atomic<long> calls{0};

  void enter();
  void leave();
};

/// Deterministic hash-to-unit-vector embedder. The vector for a text is
/// a pure function of (text, seed, dim): no batching effects, no state.
class MockEmbeddingService final : public EmbeddingService {
public:
  explicit MockEmbeddingService(std::size_t dim = 32, std::uint64_t seed = 0)
      : dim_(dim), seed_(seed) {}

  std::vector<Embedding> embed(std::span<const std::string> texts) override;
  MockStats& stats() { return stats_; }

private:
  std::size_t dim_;
  std::uint64_t seed_;
  MockStats stats_;
};

/// Table-driven scorer with a deterministic hash fallback. Programmed
/// pairs return their exact value; unknown pairs get a stable negative
/// pseudo-score derived from (context, continuation, mode, seed).
/// leading_space is a wire-level concern and is ignored here;
/// per_token_mean divides by the continuation token count as documented.
class MockScoringService final : public ScoringService {
public:
  explicit MockScoringService(std::uint64_t seed = 0) : seed_(seed) {}

  void set(std::string context, std::string continuation, double score);
  double score(const ScoreRequest& req, const ScoreOptions& opts) override;
  MockStats& stats() { return stats_; }

private:
  std::uint64_t seed_;
  std::map<std::pair<std::string, std::string>, double> table_;
  std::mutex mu_;
  MockStats stats_;
};

/// Prompt-aware completer: recognizes the shipped generation prompts and
/// emits structurally valid payloads whose content is a pure function of
/// (prompt, seed). set_fixed_output() pins the response regardless of
/// seed, for exercising distinctness-failure paths.
class MockCompletionService final : public CompletionService {
public:
  explicit MockCompletionService(std::uint64_t seed = 0) : seed_(seed) {}

  std::string complete(const std::string& prompt, std::uint64_t seed,
                       double temperature) override;
  void set_fixed_output(std::string out) { fixed_ = std::move(out); }
  MockStats& stats() { return stats_; }

private:
  std::uint64_t seed_;
  std::optional<std::string> fixed_;
  MockStats stats_;
};

}  // namespace injectbench::modelio
