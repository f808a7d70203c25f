#include "injectbench/modelio.hpp"

#include <cctype>

#include "injectbench/errors.hpp"

namespace injectbench::modelio {

std::string_view capability_name(Capability c) {
  switch (c) {
    case Capability::embed: return "embed";
    case Capability::score: return "score";
    case Capability::complete: return "complete";
  }
  return "?";
}

Capability parse_capability(std::string_view name) {
  if (name == "embed") return Capability::embed;
  if (name == "score") return Capability::score;
  if (name == "complete") return Capability::complete;
  throw ValidationError("unknown capability: '" + std::string(name) +
                        "' (expected embed|score|complete)");
}

void validate_endpoint(const ModelEndpoint& ep) {
  if (ep.name.empty()) throw ValidationError("endpoint with empty name");
  if (ep.base_url.rfind("http://", 0) != 0 && ep.base_url.rfind("https://", 0) != 0) {
    throw ValidationError("endpoint '" + ep.name + "': base_url must start with http:// or https://");
  }
  if (ep.base_url.size() <= ep.base_url.find("//") + 2) {
    throw ValidationError("endpoint '" + ep.name + "': base_url has no host");
  }
  if (ep.max_inflight < 1) {
    throw ValidationError("endpoint '" + ep.name + "': max_inflight must be >= 1");
  }
  if (ep.timeout.count() <= 0) {
    throw ValidationError("endpoint '" + ep.name + "': timeout must be positive");
  }
}

std::string default_api_key_env(std::string_view endpoint_name) {
  std::string env = "INJECTBENCH_API_KEY_";
  for (char c : endpoint_name) {
    if (c == '-') {
      env += '_';
    } else {
      env += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
  }
  return env;
}

ModelEndpoint parse_endpoint_flag(std::string_view flag) {
  // name=url:capability, where url itself contains ':' — the capability
  // is whatever follows the last ':'.
  std::size_t eq = flag.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ValidationError("bad endpoint flag '" + std::string(flag) +
                          "' (expected name=url:capability)");
  }
  std::string_view rest = flag.substr(eq + 1);
  std::size_t colon = rest.rfind(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("bad endpoint flag '" + std::string(flag) +
                          "': missing :capability suffix");
  }
  ModelEndpoint ep;
  ep.name = std::string(flag.substr(0, eq));
  ep.base_url = std::string(rest.substr(0, colon));
  ep.capability = parse_capability(rest.substr(colon + 1));
  ep.model = ep.name;
  ep.api_key_env = default_api_key_env(ep.name);
  validate_endpoint(ep);
  return ep;
}

std::string_view score_mode_name(ScoreMode m) {
  return m == ScoreMode::continuation ? "continuation" : "full-sequence";
}

ScoreMode parse_score_mode(std::string_view name) {
  if (name == "continuation") return ScoreMode::continuation;
  if (name == "full-sequence") return ScoreMode::full_sequence;
  throw ValidationError("unknown score mode: '" + std::string(name) +
                        "' (expected continuation|full-sequence)");
}

Embedding EmbeddingService::embed_one(const std::string& text) {
  std::vector<std::string> one{text};
  auto out = embed(one);
  if (out.size() != 1) throw ServiceError("embedder returned " + std::to_string(out.size()) + " vectors for 1 text");
  return std::move(out[0]);
}

}  // namespace injectbench::modelio
