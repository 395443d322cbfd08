#include "epida/text.h"

#include <cctype>

namespace epida {

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

TokenizedText TokenizedText::from_string(std::string_view text) {
  return TokenizedText{split_whitespace(text), std::string(text)};
}

TokenizedText TokenizedText::from_tokens(std::vector<std::string> tokens) {
  TokenizedText t;
  t.original = join_tokens(tokens);
  t.tokens = std::move(tokens);
  return t;
}

std::string TokenizedText::canonical() const { return join_tokens(tokens); }

}  // namespace epida
