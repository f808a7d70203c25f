#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "injectbench/corpus.hpp"
#include "injectbench/evaluation.hpp"
#include "injectbench/modelio.hpp"

namespace injectbench::datagen {

enum class ReviewStatus { pending, approved, rejected };

std::string_view review_status_name(ReviewStatus s);
ReviewStatus parse_review_status(std::string_view name);

/// Output of the two-stage generation over one chunk: four candidate
/// questions, two picked as most specific, awaiting manual review.
struct GeneratedQuestionSet {
  std::string source_chunk;
  std::vector<evaluation::Question> candidates;  // exactly 4
  std::vector<std::string> selected;             // 2 candidate question_ids
  ReviewStatus review_status = ReviewStatus::pending;
};

/// Stage 1 asks for four questions about the chunk; stage 2 asks the
/// service to pick the two most specific. Candidate ids are
/// "<chunk_id>/q1".."/q4". Malformed payloads surface as PayloadError
/// with the raw response preserved.
GeneratedQuestionSet generate_questions(const corpus::Chunk& chunk,
                                        modelio::CompletionService& svc,
                                        std::uint64_t seed);

struct ParaphraseSet {
  std::string source_chunk;
  std::vector<std::string> paraphrases;  // pairwise distinct, never the original
  std::vector<std::uint64_t> seeds;      // call seed per paraphrase (parallel)
};

/// Calls the completion service with distinct seeds until n distinct
/// paraphrases are collected; gives up after max_attempts calls with an
/// error reporting how many were obtained.
ParaphraseSet generate_paraphrases(const corpus::Chunk& chunk, int n,
                                   modelio::CompletionService& svc, std::uint64_t seed,
                                   int max_attempts = 5);

/// Seeded sample of `count` chunks without replacement, `per_chunk`
/// paraphrases each: the held-out hyperparameter-validation split.
std::vector<ParaphraseSet> make_validation_split(std::span<const corpus::Chunk> chunks,
                                                 int count, int per_chunk,
                                                 modelio::CompletionService& svc,
                                                 std::uint64_t seed);

/// The selected questions of every approved set, ready for the question
/// file (2 per approved set).
std::vector<evaluation::Question> export_approved(std::span<const GeneratedQuestionSet> sets);

// Line-delimited persistence; readers skip a leading header line.
void write_question_sets(const std::filesystem::path& path,
                         std::span<const GeneratedQuestionSet> sets,
                         const std::string& header_line = {});
std::vector<GeneratedQuestionSet> read_question_sets(const std::filesystem::path& path);

void write_paraphrase_sets(const std::filesystem::path& path,
                           std::span<const ParaphraseSet> sets,
                           const std::string& header_line = {});
std::vector<ParaphraseSet> read_paraphrase_sets(const std::filesystem::path& path);

}  // namespace injectbench::datagen
