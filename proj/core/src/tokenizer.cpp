#include "injectbench/tokenizer.hpp"

#include <cctype>

namespace injectbench::corpus {

namespace {

bool is_space_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::isspace(u) != 0;
}

}  // namespace

bool is_punct_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  if (u >= 0x80 || c == '_') return false;
  return std::ispunct(u) != 0;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  bool current_is_punct = false;

  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  };

  for (char c : text) {
    if (is_space_byte(c)) {
      flush();
      continue;
    }
    const bool punct = is_punct_byte(c);
    if (!current.empty() && punct != current_is_punct) flush();
    current_is_punct = punct;
    current.push_back(c);
  }
  flush();
  return tokens;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& tok : tokens) {
    if (tok.empty()) continue;
    if (!out.empty() && !is_punct_byte(tok.front())) out.push_back(' ');
    out += tok;
  }
  return out;
}

std::string normalize(std::string_view text) { return detokenize(tokenize(text)); }

std::size_t count_tokens(std::string_view text) { return tokenize(text).size(); }

}  // namespace injectbench::corpus
