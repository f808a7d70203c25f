#include "injectbench/prompts.hpp"

#include "injectbench/errors.hpp"

namespace injectbench::prompts {
namespace {

// Keep these byte-identical to assets/prompts/*.txt (tested).
constexpr std::string_view kParaphrasePrompt =
    "Your task is to paraphrase a text paragraph. The paragraph is given below.\n"
    "\n"
    "Make sure to keep the same meaning but change the wording. Do not change any factual "
    "information.\n"
    "\n"
    "Try to keep roughly the same length of the original text.\n"
    "\n"
    "Give NUM_PARAPHRASES different paraphrases for each text.\n"
    "\n"
    "These paraphrases should be as different from each other as possible.\n"
    "\n"
    "Return a JSON formatted string with one key, called 'paraphrases', and a list of "
    "paraphrases.\n"
    "\n"
    "Input paragraph:\n";

constexpr std::string_view kQuestionGenPrompt =
    "You will be given a text passage. Create four highly specific, high-quality "
    "multiple-choice questions about the passage. Each question must have exactly four "
    "answer options with only one correct answer, must be answerable from the passage "
    "alone, and must not depend on any other question.\n"
    "\n"
    "Return a JSON formatted string with one key, called 'questions', holding a list of "
    "four objects. Each object has keys 'question' (the question text), 'options' (a list "
    "of four answer strings), and 'correct' (the zero-based index of the correct option).\n"
    "\n"
    "Passage:\n";

constexpr std::string_view kQuestionSelectPrompt =
    "Below are four numbered questions generated from one passage. Select the two most "
    "specific questions - the two whose answers depend on details unique to this passage "
    "rather than general knowledge.\n"
    "\n"
    "Return a JSON formatted string with one key, called 'selected', holding a list of the "
    "two chosen question numbers (zero-based).\n"
    "\n"
    "Questions:\n";

}  // namespace

std::string_view paraphrase_prompt() { return kParaphrasePrompt; }
std::string_view question_gen_prompt() { return kQuestionGenPrompt; }
std::string_view question_select_prompt() { return kQuestionSelectPrompt; }

std::string render_paraphrase_prompt(int n, std::string_view paragraph) {
  if (n < 1) throw ValidationError("paraphrase count must be >= 1");
  std::string out(kParaphrasePrompt);
  std::size_t at = out.find(kNumParaphrasesToken);
  out.replace(at, kNumParaphrasesToken.size(), std::to_string(n));
  out += paragraph;
  return out;
}

std::string render_question_gen_prompt(std::string_view passage) {
  std::string out(kQuestionGenPrompt);
  out += passage;
  return out;
}

std::string render_question_select_prompt(std::span<const evaluation::Question> candidates) {
  std::string out(kQuestionSelectPrompt);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out += std::to_string(i) + ". " + candidates[i].stem + " [";
    for (std::size_t o = 0; o < candidates[i].options.size(); ++o) {
      if (o) out += " | ";
      out += candidates[i].options[o];
    }
    out += "]\n";
  }
  return out;
}

}  // namespace injectbench::prompts
