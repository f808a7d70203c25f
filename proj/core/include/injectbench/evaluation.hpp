#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "injectbench/corpus.hpp"
#include "injectbench/journal.hpp"
#include "injectbench/mock_services.hpp"
#include "injectbench/modelio.hpp"
#include "injectbench/retrieval.hpp"

namespace injectbench::evaluation {

/// One multiple-choice item: L >= 2 pairwise-distinct options, exactly
/// one correct.
struct Question {
  std::string question_id;
  std::string stem;
  std::vector<std::string> options;
  int correct_index = 0;
  corpus::Topic topic = corpus::Topic::current_events;
  std::string source_chunk;  // optional provenance
};

void validate_question(const Question& q);

std::vector<Question> read_questions(const std::filesystem::path& path);
void write_questions(const std::filesystem::path& path, std::span<const Question> questions,
                     const std::string& header_line = {});

/// One grid cell: approach label, retrieval depth, shot count, scoring
/// options.
struct EvalConfig {
  std::string approach;     // "base", "base+rag", "ft-reg", "ft-par+rag", ...
  std::string model_label;  // display name, e.g. "Mistral 7B"
  bool use_rag = false;
  int K = 0;  // retrieved documents; 0 iff !use_rag
  int shots = 0;  // 0 or 5
  modelio::ScoreOptions score;
  std::string query_prefix;  // optional embedder instruction prefix

  std::string config_id() const;
};

void validate_config(const EvalConfig& cfg);

/// Exact-rational accuracy; `value` is correct/total, never a stored
/// float.
struct KnowledgeScore {
  long correct = 0;
  long total = 1;

  static KnowledgeScore from_counts(long correct, long total);
  /// Re-enter a 3-decimal reported aggregate exactly (x1000).
  static KnowledgeScore from_reported(double reported);

  double value() const { return static_cast<double>(correct) / static_cast<double>(total); }
};

/// Strictly above the 1/L random-guess floor (exact integer compare).
bool has_knowledge(const KnowledgeScore& s, int L);

/// (injected - base) / base, exact over the rationals; base must be
/// nonzero.
double relative_gain(const KnowledgeScore& base, const KnowledgeScore& injected);

struct PromptParts {
  std::string context;
  std::vector<std::string> continuations;  // the L option texts
};

/// Frozen prompt layout: retrieved documents (best first), then the
/// worked exemplars, then the question block
///   <stem>\nA. <opt>\nB. <opt>...\nAnswer:
/// Exemplar blocks append the correct option text after "Answer:".
PromptParts assemble_prompt(const Question& q, std::span<const Question> shots,
                            const retrieval::RetrievalResult& hits,
                            const std::function<std::string(std::string_view)>& chunk_text);

/// Everything answer_question/run_grid may touch. Raw pointers are
/// non-owning; null means the capability is absent.
struct EvalServices {
  modelio::ScoringService* scorer = nullptr;
  modelio::EmbeddingService* embedder = nullptr;   // required when use_rag
  const retrieval::VectorIndex* index = nullptr;   // required when use_rag
  const corpus::CorpusStore* store = nullptr;      // chunk texts for RAG prompts
  std::span<const Question> exemplars;             // required when shots > 0
};

struct AnswerResult {
  int chosen = -1;
  std::vector<double> scores;
};

/// Scores every option and picks the argmax; ties go to the lowest
/// option index. Errors carry the question id.
AnswerResult answer_question(const EvalConfig& cfg, const Question& q,
                             const EvalServices& svc);

KnowledgeScore knowledge_score(std::span<const journal::RowRecord> rows);

struct ResultTable {
  std::vector<journal::RowRecord> rows;
  std::vector<journal::FailureRecord> failures;
  // (config_id, score), in config order
  std::vector<std::pair<std::string, KnowledgeScore>> aggregates;
};

struct GridOptions {
  int workers = 1;
  journal::JournalWriter* writer = nullptr;          // optional incremental journal
  const journal::Journal* resume_from = nullptr;     // prior rows to reuse, not re-score
};

/// Runs every config over every question. Journal rows come out in
/// question order per config regardless of worker count, so equal
/// inputs give byte-identical journals at any parallelism level.
/// Per-question failures are recorded and the grid keeps going. With
/// resume_from, rows already journaled are reused instead of re-scored
/// and still count toward the (re-emitted) aggregates; readers take the
/// last aggregate per config.
ResultTable run_grid(std::span<const Question> questions, std::span<const EvalConfig> configs,
                     const EvalServices& svc, const GridOptions& opts = {});

}  // namespace injectbench::evaluation
