#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace injectbench::corpus {

/// Identifier recorded in corpus stores and training sets so downstream
/// consumers know which token counting scheme produced them.
inline constexpr std::string_view kTokenizerId = "ws-punct/1";

/// Deterministic whitespace-plus-punctuation splitter. A token is
/// either a maximal run of word characters (alphanumeric, '_' and any
/// non-ASCII byte) or a maximal run of ASCII punctuation. Whitespace
/// only separates.
std::vector<std::string> tokenize(std::string_view text);

/// Detokenization rule: tokens are joined with a single space, except
/// that a token starting with a punctuation character attaches directly
/// to its predecessor ("a , b" and "a, b" both render as "a, b").
std::string detokenize(const std::vector<std::string>& tokens);

/// detokenize(tokenize(text)); idempotent.
std::string normalize(std::string_view text);

std::size_t count_tokens(std::string_view text);

bool is_punct_byte(char c);

}  // namespace injectbench::corpus
