#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "injectbench/embedding.hpp"

namespace injectbench::modelio {

enum class Capability { embed, score, complete };

std::string_view capability_name(Capability c);
Capability parse_capability(std::string_view name);  // throws ValidationError

/// Connection descriptor for one model service.
struct ModelEndpoint {
  std::string name;
  std::string base_url;
  Capability capability = Capability::score;
  std::string model;        // model identifier sent on the wire; defaults to name
  std::string api_key_env;  // env var holding the bearer token; empty = unauthenticated
  std::chrono::milliseconds timeout{30000};
  int max_inflight = 4;
};

/// Checks url shape, max_inflight >= 1; throws ValidationError.
void validate_endpoint(const ModelEndpoint& ep);

/// Parses the CLI form "name=url:capability", e.g.
/// "scorer=http://localhost:8000:score". The api key env var defaults
/// to INJECTBENCH_API_KEY_<NAME> (name uppercased, '-' -> '_').
ModelEndpoint parse_endpoint_flag(std::string_view flag);

std::string default_api_key_env(std::string_view endpoint_name);

/// Context/continuation pair scored by the model.
struct ScoreRequest {
  std::string context;
  std::string continuation;  // must be non-empty
};

enum class ScoreMode {
  continuation,   // sum of continuation-token conditional log-probs (default)
  full_sequence,  // sum over every available token log-prob of context||continuation
};

std::string_view score_mode_name(ScoreMode m);
ScoreMode parse_score_mode(std::string_view name);

struct ScoreOptions {
  ScoreMode mode = ScoreMode::continuation;
  bool leading_space = true;   // prefix continuation with one space before scoring
  bool per_token_mean = false; // length-normalize: divide by continuation token count
};

/// Produces one embedding per input text, order preserved.
class EmbeddingService {
public:
  virtual ~EmbeddingService() = default;
  virtual std::vector<Embedding> embed(std::span<const std::string> texts) = 0;
  Embedding embed_one(const std::string& text);
};

/// Returns a log-probability score for continuation given context.
class ScoringService {
public:
  virtual ~ScoringService() = default;
  virtual double score(const ScoreRequest& req, const ScoreOptions& opts) = 0;
};

/// Seeded free-text generation.
class CompletionService {
public:
  virtual ~CompletionService() = default;
  virtual std::string complete(const std::string& prompt, std::uint64_t seed,
                               double temperature) = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{250};  // doubles per retry
};

// HTTP clients speaking the wire protocol frozen in docs/protocol.md.
// Each respects endpoint.max_inflight; embed/score retry per policy
// (idempotent), complete does not.
std::unique_ptr<EmbeddingService> make_http_embedder(const ModelEndpoint& ep,
                                                     RetryPolicy retry = {});
std::unique_ptr<ScoringService> make_http_scorer(const ModelEndpoint& ep,
                                                 RetryPolicy retry = {});
std::unique_ptr<CompletionService> make_http_completer(const ModelEndpoint& ep);

}  // namespace injectbench::modelio
