#include "injectbench/datagen.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "injectbench/errors.hpp"
#include "injectbench/prompts.hpp"
#include "injectbench/util.hpp"

namespace injectbench::datagen {
namespace {

using ojson = nlohmann::ordered_json;

ojson parse_payload(const std::string& raw, const std::string& what) {
  ojson j = ojson::parse(raw, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw PayloadError(what + ": response is not a JSON object", raw);
  }
  return j;
}

std::vector<evaluation::Question> parse_candidates(const std::string& raw,
                                                   const corpus::Chunk& chunk) {
  ojson j = parse_payload(raw, "question generation for " + chunk.chunk_id);
  if (!j.contains("questions") || !j["questions"].is_array()) {
    throw PayloadError("question generation for " + chunk.chunk_id + ": no 'questions' list",
                       raw);
  }
  const auto& qs = j["questions"];
  if (qs.size() != 4) {
    throw PayloadError("question generation for " + chunk.chunk_id + ": candidate count " +
                       std::to_string(qs.size()) + " != 4", raw);
  }
  std::vector<evaluation::Question> out;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    evaluation::Question q;
    q.question_id = chunk.chunk_id + "/q" + std::to_string(i + 1);
    try {
      q.stem = qs[i].at("question").get<std::string>();
      q.options = qs[i].at("options").get<std::vector<std::string>>();
      q.correct_index = qs[i].at("correct").get<int>();
    } catch (const ojson::exception& e) {
      throw PayloadError("question generation for " + chunk.chunk_id + ": candidate " +
                         std::to_string(i) + ": " + e.what(), raw);
    }
    q.topic = chunk.topic;
    q.source_chunk = chunk.chunk_id;
    if (q.options.size() != 4) {
      throw PayloadError("question generation for " + chunk.chunk_id + ": candidate " +
                         std::to_string(i) + " has " + std::to_string(q.options.size()) +
                         " options, want 4", raw);
    }
    try {
      evaluation::validate_question(q);
    } catch (const ValidationError& e) {
      throw PayloadError(std::string("question generation: ") + e.what(), raw);
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<int> parse_selection(const std::string& raw, const std::string& chunk_id) {
  ojson j = parse_payload(raw, "question selection for " + chunk_id);
  if (!j.contains("selected") || !j["selected"].is_array() || j["selected"].size() != 2) {
    throw PayloadError("question selection for " + chunk_id + ": want a 'selected' list of 2",
                       raw);
  }
  std::vector<int> out;
  for (const auto& v : j["selected"]) {
    if (!v.is_number_integer()) {
      throw PayloadError("question selection for " + chunk_id + ": non-integer index", raw);
    }
    int idx = v.get<int>();
    if (idx < 0 || idx > 3) {
      throw PayloadError("question selection for " + chunk_id + ": index " +
                         std::to_string(idx) + " out of [0,3]", raw);
    }
    out.push_back(idx);
  }
  if (out[0] == out[1]) {
    throw PayloadError("question selection for " + chunk_id + ": duplicate index", raw);
  }
  return out;
}

ojson question_set_to_json(const GeneratedQuestionSet& s) {
  ojson cands = ojson::array();
  for (const auto& q : s.candidates) {
    ojson c{{"question_id", q.question_id},
            {"stem", q.stem},
            {"options", q.options},
            {"correct_index", q.correct_index},
            {"topic", corpus::topic_key(q.topic)}};
    cands.push_back(std::move(c));
  }
  return ojson{{"source_chunk", s.source_chunk},
               {"candidates", cands},
               {"selected", s.selected},
               {"review_status", review_status_name(s.review_status)}};
}

GeneratedQuestionSet question_set_from_json(const ojson& j) {
  GeneratedQuestionSet s;
  s.source_chunk = j.at("source_chunk").get<std::string>();
  for (const auto& c : j.at("candidates")) {
    evaluation::Question q;
    q.question_id = c.at("question_id").get<std::string>();
    q.stem = c.at("stem").get<std::string>();
    q.options = c.at("options").get<std::vector<std::string>>();
    q.correct_index = c.at("correct_index").get<int>();
    q.topic = corpus::parse_topic(c.at("topic").get<std::string>());
    q.source_chunk = s.source_chunk;
    s.candidates.push_back(std::move(q));
  }
  s.selected = j.at("selected").get<std::vector<std::string>>();
  s.review_status = parse_review_status(j.at("review_status").get<std::string>());
  return s;
}

}  // namespace

std::string_view review_status_name(ReviewStatus s) {
  switch (s) {
    case ReviewStatus::pending: return "pending";
    case ReviewStatus::approved: return "approved";
    case ReviewStatus::rejected: return "rejected";
  }
  return "?";
}

ReviewStatus parse_review_status(std::string_view name) {
  if (name == "pending") return ReviewStatus::pending;
  if (name == "approved") return ReviewStatus::approved;
  if (name == "rejected") return ReviewStatus::rejected;
  throw ValidationError("unknown review status: '" + std::string(name) + "'");
}

GeneratedQuestionSet generate_questions(const corpus::Chunk& chunk,
                                        modelio::CompletionService& svc,
                                        std::uint64_t seed) {
  if (chunk.text.empty()) throw ValidationError("cannot generate questions for empty chunk");

  GeneratedQuestionSet out;
  out.source_chunk = chunk.chunk_id;

  std::string raw = svc.complete(prompts::render_question_gen_prompt(chunk.text), seed, 0.0);
  out.candidates = parse_candidates(raw, chunk);

  std::string raw2 = svc.complete(prompts::render_question_select_prompt(out.candidates),
                                  util::mix_seed(seed, 1), 0.0);
  for (int idx : parse_selection(raw2, chunk.chunk_id)) {
    out.selected.push_back(out.candidates[static_cast<std::size_t>(idx)].question_id);
  }
  out.review_status = ReviewStatus::pending;
  return out;
}

ParaphraseSet generate_paraphrases(const corpus::Chunk& chunk, int n,
                                   modelio::CompletionService& svc, std::uint64_t seed,
                                   int max_attempts) {
  if (n < 1) throw ValidationError("paraphrase count must be >= 1");
  if (chunk.text.empty()) throw ValidationError("cannot paraphrase empty chunk");

  ParaphraseSet out;
  out.source_chunk = chunk.chunk_id;
  std::unordered_set<std::string> seen;

  for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.paraphrases.size()) < n;
       ++attempt) {
    const std::uint64_t call_seed = util::mix_seed(seed, static_cast<std::uint64_t>(attempt));
    const int want = n - static_cast<int>(out.paraphrases.size());
    std::string raw = svc.complete(prompts::render_paraphrase_prompt(want, chunk.text),
                                   call_seed, 1.0);
    ojson j = parse_payload(raw, "paraphrase generation for " + chunk.chunk_id);
    if (!j.contains("paraphrases") || !j["paraphrases"].is_array()) {
      throw PayloadError("paraphrase generation for " + chunk.chunk_id +
                         ": no 'paraphrases' list", raw);
    }
    for (const auto& p : j["paraphrases"]) {
      if (!p.is_string()) {
        throw PayloadError("paraphrase generation for " + chunk.chunk_id +
                           ": non-string paraphrase", raw);
      }
      std::string text = p.get<std::string>();
      if (text.empty() || text == chunk.text) continue;  // echoes don't count
      if (!seen.insert(text).second) continue;           // repeats don't count
      out.paraphrases.push_back(std::move(text));
      out.seeds.push_back(call_seed);
      if (static_cast<int>(out.paraphrases.size()) == n) break;
    }
  }
  if (static_cast<int>(out.paraphrases.size()) < n) {
    throw ServiceError("paraphrase generation for " + chunk.chunk_id + ": collected " +
                       std::to_string(out.paraphrases.size()) + " of " + std::to_string(n) +
                       " distinct paraphrases within " + std::to_string(max_attempts) +
                       " attempts");
  }
  return out;
}

std::vector<ParaphraseSet> make_validation_split(std::span<const corpus::Chunk> chunks,
                                                 int count, int per_chunk,
                                                 modelio::CompletionService& svc,
                                                 std::uint64_t seed) {
  if (count < 0 || static_cast<std::size_t>(count) > chunks.size()) {
    throw ValidationError("validation split of " + std::to_string(count) + " from " +
                          std::to_string(chunks.size()) + " chunks");
  }
  if (per_chunk < 1) throw ValidationError("per_chunk must be >= 1");

  std::mt19937_64 rng(util::mix_seed(seed, 0x76616c6964ULL));  // split-selection stream
  std::vector<std::uint32_t> order = util::shuffled_indices(chunks.size(), rng);

  std::vector<ParaphraseSet> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const corpus::Chunk& c = chunks[order[static_cast<std::size_t>(i)]];
    out.push_back(generate_paraphrases(c, per_chunk, svc,
                                       util::mix_seed(seed, util::fnv1a64(c.chunk_id))));
  }
  return out;
}

std::vector<evaluation::Question> export_approved(std::span<const GeneratedQuestionSet> sets) {
  std::vector<evaluation::Question> out;
  for (const auto& s : sets) {
    if (s.review_status != ReviewStatus::approved) continue;
    for (const auto& id : s.selected) {
      auto it = std::find_if(s.candidates.begin(), s.candidates.end(),
                             [&](const evaluation::Question& q) { return q.question_id == id; });
      if (it == s.candidates.end()) {
        throw ValidationError("set " + s.source_chunk + ": selected id " + id +
                              " not among candidates");
      }
      evaluation::validate_question(*it);
      out.push_back(*it);
    }
  }
  return out;
}

void write_question_sets(const std::filesystem::path& path,
                         std::span<const GeneratedQuestionSet> sets,
                         const std::string& header_line) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  if (!header_line.empty()) out << header_line << '\n';
  for (const auto& s : sets) out << question_set_to_json(s).dump() << '\n';
}

std::vector<GeneratedQuestionSet> read_question_sets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<GeneratedQuestionSet> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ojson j = ojson::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": not a JSON object record");
    }
    if (j.contains("_header")) continue;
    try {
      out.push_back(question_set_from_json(j));
    } catch (const ojson::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_paraphrase_sets(const std::filesystem::path& path,
                           std::span<const ParaphraseSet> sets,
                           const std::string& header_line) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  if (!header_line.empty()) out << header_line << '\n';
  for (const auto& s : sets) {
    ojson j{{"source_chunk", s.source_chunk},
            {"paraphrases", s.paraphrases},
            {"seeds", s.seeds}};
    out << j.dump() << '\n';
  }
}

std::vector<ParaphraseSet> read_paraphrase_sets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<ParaphraseSet> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ojson j = ojson::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": not a JSON object record");
    }
    if (j.contains("_header")) continue;
    ParaphraseSet s;
    s.source_chunk = j.at("source_chunk").get<std::string>();
    s.paraphrases = j.at("paraphrases").get<std::vector<std::string>>();
    if (j.contains("seeds")) s.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (s.seeds.size() != s.paraphrases.size()) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": seeds/paraphrases length mismatch");
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace injectbench::datagen
