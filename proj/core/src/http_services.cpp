// HTTP clients for the embed/score/complete capabilities. Wire schemas
// are frozen in docs/protocol.md; they follow the prevailing open
// inference-server convention (/v1/embeddings, /v1/completions).
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "injectbench/errors.hpp"
#include "injectbench/modelio.hpp"
#include "injectbench/tokenizer.hpp"
#include "injectbench/util.hpp"

namespace injectbench::modelio {
namespace {

using nlohmann::json;

struct ParsedUrl {
  std::string host_port;  // scheme://host[:port]
  std::string path_prefix;
};

ParsedUrl split_url(const std::string& base_url) {
  std::size_t scheme = base_url.find("://");
  if (scheme == std::string::npos) throw ValidationError("bad base_url: " + base_url);
  std::size_t slash = base_url.find('/', scheme + 3);
  if (slash == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, slash), prefix};
}

class HttpClientBase {
public:
  HttpClientBase(const ModelEndpoint& ep, RetryPolicy retry)
      : ep_(ep), retry_(retry), url_(split_url(ep.base_url)),
        cli_(url_.host_port), gate_(ep.max_inflight) {
    validate_endpoint(ep);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(ep.timeout);
    cli_.set_connection_timeout(secs.count() ? secs : std::chrono::seconds(1));
    cli_.set_read_timeout(secs.count() ? secs : std::chrono::seconds(1));
    if (!ep.api_key_env.empty()) {
      if (const char* key = std::getenv(ep.api_key_env.c_str())) {
        cli_.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
      }
    }
  }

protected:
  // POSTs body to path; retries transport failures, 429 and 5xx when
  // idempotent. Throws ServiceError with the last failure otherwise.
  json post_json(const std::string& path, const json& body, bool idempotent) {
    util::SemaphoreGuard slot(gate_);
    int attempts = idempotent ? retry_.max_attempts : 1;
    auto backoff = retry_.initial_backoff;
    std::string last_error;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
      auto res = cli_.Post(url_.path_prefix + path, body.dump(), "application/json");
      if (!res) {
        last_error = "transport failure (" + httplib::to_string(res.error()) + ")";
      } else if (res->status == 429 || res->status >= 500) {
        last_error = "status " + std::to_string(res->status);
      } else if (res->status < 200 || res->status >= 300) {
        throw ServiceError(ep_.name + path + ": status " + std::to_string(res->status) +
                           ": " + res->body.substr(0, 256));
      } else {
        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded()) {
          throw PayloadError(ep_.name + path + ": response is not valid JSON", res->body);
        }
        return parsed;
      }
      if (attempt < attempts) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
    }
    throw ServiceError(ep_.name + path + ": " + last_error + " after " +
                       std::to_string(attempts) + " attempt(s)");
  }

  ModelEndpoint ep_;
  RetryPolicy retry_;
  ParsedUrl url_;
  httplib::Client cli_;
  util::Semaphore gate_;
};

class HttpEmbedder final : public EmbeddingService, HttpClientBase {
public:
  HttpEmbedder(const ModelEndpoint& ep, RetryPolicy retry) : HttpClientBase(ep, retry) {
    if (ep.capability != Capability::embed) {
      throw ValidationError("endpoint '" + ep.name + "' lacks the embed capability");
    }
  }

  std::vector<Embedding> embed(std::span<const std::string> texts) override {
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (texts[i].empty()) throw ValidationError("embed input " + std::to_string(i) + " is empty");
    }
    json body{{"model", ep_.model}, {"input", json::array()}};
    for (const auto& t : texts) body["input"].push_back(t);
    json res = post_json("/v1/embeddings", body, /*idempotent=*/true);

    std::vector<Embedding> out(texts.size());
    std::vector<bool> seen(texts.size(), false);
    const auto data = res.find("data");
    if (data == res.end() || !data->is_array() || data->size() != texts.size()) {
      throw PayloadError(ep_.name + ": embeddings response has wrong entry count", res.dump());
    }
    for (const auto& item : *data) {
      std::size_t idx = item.value("index", static_cast<std::size_t>(out.size()));
      if (idx >= out.size() || seen[idx]) {
        throw PayloadError(ep_.name + ": bad embedding index for input " + std::to_string(idx),
                           res.dump());
      }
      Embedding e;
      for (const auto& x : item.at("embedding")) e.v.push_back(x.get<double>());
      if (!e.all_finite() || e.v.empty()) {
        throw PayloadError(ep_.name + ": non-finite or empty embedding at input " +
                           std::to_string(idx), res.dump());
      }
      out[idx] = std::move(e);
      seen[idx] = true;
    }
    for (std::size_t i = 1; i < out.size(); ++i) {
      if (out[i].dim() != out[0].dim()) {
        throw ServiceError(ep_.name + ": embedding dim mismatch at input " + std::to_string(i) +
                           " (" + std::to_string(out[i].dim()) + " vs " +
                           std::to_string(out[0].dim()) + ")");
      }
    }
    return out;
  }
};

class HttpScorer final : public ScoringService, HttpClientBase {
public:
  HttpScorer(const ModelEndpoint& ep, RetryPolicy retry) : HttpClientBase(ep, retry) {
    if (ep.capability != Capability::score) {
      throw ValidationError("endpoint '" + ep.name + "' lacks the score capability");
    }
  }

  double score(const ScoreRequest& req, const ScoreOptions& opts) override {
    if (req.continuation.empty()) throw ValidationError("score request with empty continuation");
    if (corpus::count_tokens(req.continuation) == 0) {
      throw ValidationError("continuation tokenizes to zero tokens: '" + req.continuation + "'");
    }
    std::string full = req.context + (opts.leading_space ? " " : "") + req.continuation;
    json body{{"model", ep_.model}, {"prompt", full},     {"max_tokens", 0},
              {"echo", true},       {"logprobs", 0}};
    json res = post_json("/v1/completions", body, /*idempotent=*/true);

    const json* lp = nullptr;
    if (res.contains("choices") && res["choices"].is_array() && !res["choices"].empty()) {
      const auto& c0 = res["choices"][0];
      if (c0.contains("logprobs") && c0["logprobs"].is_object()) lp = &c0["logprobs"];
    }
    if (!lp || !lp->contains("token_logprobs") || !lp->contains("text_offset")) {
      throw PayloadError(ep_.name + ": scoring response lacks echo logprobs", res.dump());
    }
    const auto& logprobs = (*lp)["token_logprobs"];
    const auto& offsets = (*lp)["text_offset"];
    if (!logprobs.is_array() || !offsets.is_array() || logprobs.size() != offsets.size()) {
      throw PayloadError(ep_.name + ": malformed logprob arrays", res.dump());
    }

    // The continuation starts exactly at the end of the context text;
    // a token straddling that byte means the option cannot be scored
    // separately from its prompt.
    const std::size_t boundary = req.context.size();
    std::size_t first = logprobs.size();
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      std::size_t off = offsets[i].get<std::size_t>();
      if (off == boundary) {
        first = i;
        break;
      }
      if (off > boundary) {
        throw TokenBoundaryError(ep_.name + ": no token starts at context end (offset " +
                                 std::to_string(boundary) + "; nearest token starts at " +
                                 std::to_string(off) + ")");
      }
    }
    if (first == logprobs.size()) {
      throw TokenBoundaryError(ep_.name + ": continuation produced no tokens past the context");
    }

    double sum = 0.0;
    int counted = 0;
    std::size_t start = (opts.mode == ScoreMode::full_sequence) ? 0 : first;
    for (std::size_t i = start; i < logprobs.size(); ++i) {
      if (logprobs[i].is_null()) {
        // Only the very first token of the echo may lack a conditional
        // probability (nothing to condition on).
        if (i == 0) continue;
        throw PayloadError(ep_.name + ": null logprob at token " + std::to_string(i), res.dump());
      }
      sum += logprobs[i].get<double>();
      ++counted;
    }
    if (counted == 0) throw ServiceError(ep_.name + ": no scoreable tokens");
    if (opts.per_token_mean) sum /= counted;
    return sum;
  }
};

class HttpCompleter final : public CompletionService, HttpClientBase {
public:
  explicit HttpCompleter(const ModelEndpoint& ep) : HttpClientBase(ep, RetryPolicy{}) {
    if (ep.capability != Capability::complete) {
      throw ValidationError("endpoint '" + ep.name + "' lacks the complete capability");
    }
  }

  std::string complete(const std::string& prompt, std::uint64_t seed,
                       double temperature) override {
    if (temperature < 0) throw ValidationError("temperature must be >= 0");
    if (prompt.empty()) throw ValidationError("empty prompt");
    json body{{"model", ep_.model},
              {"prompt", prompt},
              {"seed", seed},
              {"temperature", temperature},
              {"max_tokens", 1024}};
    // Generation is not retried: a half-billed duplicate is worse than a
    // reported failure.
    json res = post_json("/v1/completions", body, /*idempotent=*/false);
    if (!res.contains("choices") || !res["choices"].is_array() || res["choices"].empty()) {
      throw PayloadError(ep_.name + ": completion response has no choices", res.dump());
    }
    std::string text = res["choices"][0].value("text", "");
    if (text.empty()) throw ServiceError(ep_.name + ": empty completion");
    return text;
  }
};

}  // namespace

std::unique_ptr<EmbeddingService> make_http_embedder(const ModelEndpoint& ep, RetryPolicy retry) {
  return std::make_unique<HttpEmbedder>(ep, retry);
}

std::unique_ptr<ScoringService> make_http_scorer(const ModelEndpoint& ep, RetryPolicy retry) {
  return std::make_unique<HttpScorer>(ep, retry);
}

std::unique_ptr<CompletionService> make_http_completer(const ModelEndpoint& ep) {
  return std::make_unique<HttpCompleter>(ep);
}

}  // namespace injectbench::modelio
