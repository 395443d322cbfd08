#pragma once

// Synthetic keyword classification task.
//
// Every class owns groups of interchangeable keywords; a text is a bag of
// shared filler words plus keywords of its class, optionally mixed with a
// minority of keywords from other classes. The lexicon links keywords within
// a group (and filler words among themselves), so synonym-based augmentation
// can surface keywords a small training split never contains. A text's true
// label is the class whose keywords it contains most often, which gives an
// exact labeling oracle for augmented text.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epida/dataset.h"
#include "epida/lexicon.h"
#include "epida/metrics.h"

namespace epida {

struct KeywordTaskConfig {
  std::size_t classes = 3;
  std::size_t groups_per_class = 8;
  std::size_t synonyms_per_group = 4;
  std::size_t filler_words = 60;
  std::size_t filler_group_size = 2;  // 0 or 1: fillers have no synonyms
  std::size_t min_fillers = 3;
  std::size_t max_fillers = 6;
  std::size_t min_keywords = 2;
  std::size_t max_keywords = 2;
  // Keywords of other classes mixed in; must stay below min_keywords so the
  // sample's own class is the strict majority.
  std::size_t max_distractors = 1;
  std::uint64_t vocabulary_seed = 7;
};

class KeywordTask {
 public:
  explicit KeywordTask(KeywordTaskConfig cfg = {});

  // n samples with uniformly drawn labels; deterministic in seed.
  Dataset generate(std::size_t n, std::uint64_t seed) const;

  const SynonymLexicon& lexicon() const noexcept { return lexicon_; }
  const KeywordTaskConfig& config() const noexcept { return cfg_; }
  std::vector<std::string> label_names() const;

  // Class whose keywords are strictly most frequent; nullopt for no keyword
  // or a tie.
  std::optional<std::size_t> label_of(const TokenizedText& text) const;
  LabelingOracle oracle() const;

 private:
  KeywordTaskConfig cfg_;
  // keywords_[class][group][synonym]
  std::vector<std::vector<std::vector<std::string>>> keywords_;
  std::vector<std::string> fillers_;
  std::map<std::string, std::size_t, std::less<>> keyword_class_;
  SynonymLexicon lexicon_;
};

}  // namespace epida
