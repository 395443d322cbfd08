#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace epida {

// Headword -> synonyms. Lookups are case-insensitive, stored words are
// lowercase and a word never lists itself.
//
// File format (UTF-8): one group per line, whitespace separated, the first
// word is the headword and the rest are its synonyms. Lines starting with
// '#' and blank lines are ignored.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  static SynonymLexicon load(const std::filesystem::path& path);
  static SynonymLexicon parse(std::string_view contents, std::string_view source = "<memory>");
  // Small general-English lexicon used by tests and as the CLI default.
  static const SynonymLexicon& builtin();

  void add(std::string_view headword, const std::vector<std::string>& synonyms);
  // Every word of the group becomes a headword for all the others.
  void add_group(const std::vector<std::string>& words);

  // Sorted synonyms of `word`; empty when the word is unknown.
  const std::vector<std::string>& lookup(std::string_view word) const;
  bool has_synonyms(std::string_view word) const { return !lookup(word).empty(); }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

// Words ineligible for synonym replacement and removed by preprocessing.
// File format: one word per line, '#' comments allowed.
class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::set<std::string, std::less<>> words) : words_(std::move(words)) {}

  static StopwordList load(const std::filesystem::path& path);
  static const StopwordList& builtin();

  bool contains(std::string_view word) const;
  std::size_t size() const noexcept { return words_.size(); }

 private:
  std::set<std::string, std::less<>> words_;
};

}  // namespace epida
