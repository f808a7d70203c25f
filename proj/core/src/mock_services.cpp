#include "injectbench/mock_services.hpp"

#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

#include "injectbench/errors.hpp"
#include "injectbench/tokenizer.hpp"
#include "injectbench/util.hpp"

namespace injectbench::modelio {
namespace {

using nlohmann::json;

struct StatsGuard {
  MockStats& s;
  explicit StatsGuard(MockStats& stats) : s(stats) { s.enter(); }
  ~StatsGuard() { s.leave(); }
};

void require_scoreable(const ScoreRequest& req) {
  if (req.continuation.empty()) throw ValidationError("score request with empty continuation");
  if (corpus::count_tokens(req.continuation) == 0) {
    throw ValidationError("continuation tokenizes to zero tokens: '" + req.continuation + "'");
  }
}

// Last nonblank line of the prompt: the paragraph our generation prompts
// place at the end.
std::string trailing_paragraph(const std::string& prompt) {
  std::size_t end = prompt.find_last_not_of(" \t\n");
  if (end == std::string::npos) return {};
  std::size_t start = prompt.rfind('\n', end);
  start = (start == std::string::npos) ? 0 : start + 1;
  return prompt.substr(start, end - start + 1);
}

int requested_paraphrase_count(const std::string& prompt) {
  // "Give <n> different paraphrases" with the count already substituted.
  std::size_t at = prompt.find("Give ");
  if (at == std::string::npos) return 1;
  at += 5;
  int n = 0;
  while (at < prompt.size() && prompt[at] >= '0' && prompt[at] <= '9') {
    n = n * 10 + (prompt[at] - '0');
    ++at;
  }
  return n > 0 ? n : 1;
}

}  // namespace

void MockStats::enter() {
  int now = inflight.fetch_add(1) + 1;
  int seen = max_inflight_seen.load();
  while (now > seen && !max_inflight_seen.compare_exchange_weak(seen, now)) {
  }
  calls.fetch_add(1);
}

void MockStats::leave() { inflight.fetch_sub(1); }

std::vector<Embedding> MockEmbeddingService::embed(std::span<const std::string> texts) {
  StatsGuard g(stats_);
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) {
      throw ValidationError("embed input " + std::to_string(i) + " is empty");
    }
    std::mt19937_64 rng(util::mix_seed(util::fnv1a64(texts[i]), seed_));
    Embedding e;
    e.v.resize(dim_);
    for (auto& x : e.v) x = 2.0 * util::unit_real(rng) - 1.0;
    double n = e.norm();
    if (n < 1e-12) {
      e.v[0] = 1.0;
    } else {
      for (auto& x : e.v) x /= n;
    }
    out.push_back(std::move(e));
  }
  return out;
}

void MockScoringService::set(std::string context, std::string continuation, double score) {
  std::lock_guard lock(mu_);
  table_[{std::move(context), std::move(continuation)}] = score;
}

double MockScoringService::score(const ScoreRequest& req, const ScoreOptions& opts) {
  StatsGuard g(stats_);
  require_scoreable(req);
  double base;
  bool from_table = false;
  {
    std::lock_guard lock(mu_);
    auto it = table_.find({req.context, req.continuation});
    if (it != table_.end()) {
      base = it->second;
      from_table = true;
    }
  }
  if (!from_table) {
    std::uint64_t h = util::fnv1a64(req.context + "\x1f" + req.continuation);
    h = util::mix_seed(h, seed_ * 2 + (opts.mode == ScoreMode::full_sequence ? 1 : 0));
    base = -0.25 - static_cast<double>(h % 9000) / 1000.0;
  }
  if (opts.per_token_mean) {
    int n = corpus::count_tokens(req.continuation);
    base /= std::max(1, n);
  }
  return base;
}

std::string MockCompletionService::complete(const std::string& prompt, std::uint64_t seed,
                                            double temperature) {
  StatsGuard g(stats_);
  if (temperature < 0) throw ValidationError("temperature must be >= 0");
  if (prompt.empty()) throw ValidationError("empty prompt");
  if (fixed_) return *fixed_;

  std::uint64_t h = util::mix_seed(util::fnv1a64(prompt), util::mix_seed(seed, seed_));
  std::string tag = util::to_hex(h);
  std::string para = trailing_paragraph(prompt);

  if (prompt.find("'paraphrases'") != std::string::npos) {
    int n = requested_paraphrase_count(prompt);
    json list = json::array();
    for (int i = 0; i < n; ++i) {
      list.push_back("Restated (v" + std::to_string(i + 1) + "/" + tag.substr(0, 8) + "): " + para);
    }
    return json{{"paraphrases", list}}.dump();
  }
  if (prompt.find("most specific") != std::string::npos) {
    int a = static_cast<int>(h % 3);             // 0..2
    int b = a + 1 + static_cast<int>((h >> 8) % static_cast<std::uint64_t>(3 - a));
    return json{{"selected", {a, b}}}.dump();
  }
  if (prompt.find("multiple-choice questions") != std::string::npos) {
    json qs = json::array();
    for (int i = 0; i < 4; ++i) {
      std::string qtag = tag.substr(0, 6) + "-" + std::to_string(i + 1);
      json options = json::array();
      for (int o = 0; o < 4; ++o) {
        options.push_back("Detail " + std::string(1, static_cast<char>('A' + o)) + " (" + qtag + ")");
      }
      qs.push_back(json{{"question", "Which detail does passage " + qtag + " state?"},
                        {"options", options},
                        {"correct", static_cast<int>((h >> (8 * i)) % 4)}});
    }
    return json{{"questions", qs}}.dump();
  }
  return "Completion " + tag + " for: " + para;
}

}  // namespace injectbench::modelio
