#pragma once

#include <span>
#include <string>
#include <string_view>

#include "injectbench/evaluation.hpp"

namespace injectbench::prompts {

/// Placeholder substituted by render_paraphrase_prompt.
inline constexpr std::string_view kNumParaphrasesToken = "NUM_PARAPHRASES";

// The frozen generation prompts. Embedded verbatim; the same texts ship
// as assets/prompts/*.txt and a test pins the two copies together.
std::string_view paraphrase_prompt();
std::string_view question_gen_prompt();
std::string_view question_select_prompt();

/// Paraphrase prompt with the count substituted and the paragraph
/// appended. n must be >= 1.
std::string render_paraphrase_prompt(int n, std::string_view paragraph);

std::string render_question_gen_prompt(std::string_view passage);

/// Lists each candidate as "<i>. <stem> [opt | opt | ...]".
std::string render_question_select_prompt(std::span<const evaluation::Question> candidates);

}  // namespace injectbench::prompts
