#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace epida {

// Whitespace-tokenized text. `original` keeps the raw input for reporting;
// `tokens` is what every model and augmenter operates on.
struct TokenizedText {
  std::vector<std::string> tokens;
  std::string original;

  // Splits on ASCII whitespace; `original` is set to the input verbatim.
  static TokenizedText from_string(std::string_view text);
  static TokenizedText from_tokens(std::vector<std::string> tokens);

  bool empty() const noexcept { return tokens.empty(); }
  std::size_t size() const noexcept { return tokens.size(); }

  // Tokens joined with single spaces. Re-tokenizing the canonical form is
  // the identity.
  std::string canonical() const;

  friend bool operator==(const TokenizedText& a, const TokenizedText& b) {
    return a.tokens == b.tokens;
  }
};

std::vector<std::string> split_whitespace(std::string_view text);
std::string join_tokens(const std::vector<std::string>& tokens);
std::string to_lower_ascii(std::string_view text);

}  // namespace epida
