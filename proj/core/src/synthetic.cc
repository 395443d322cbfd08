#include "epida/synthetic.h"

#include <algorithm>
#include <random>
#include <set>

#include "epida/errors.h"

namespace epida {
namespace {

std::string make_word(std::mt19937_64& rng) {
  static constexpr char kConsonants[] = "bdfgklmnprstvz";
  static constexpr char kVowels[] = "aeiou";
  std::uniform_int_distribution<int> cons(0, 13), vow(0, 4), syl(2, 3);
  std::string w;
  const int n = syl(rng);
  for (int i = 0; i < n; ++i) {
    w.push_back(kConsonants[cons(rng)]);
    w.push_back(kVowels[vow(rng)]);
  }
  return w;
}

}  // namespace

KeywordTask::KeywordTask(KeywordTaskConfig cfg) : cfg_(cfg) {
  if (cfg_.classes < 2) throw ConfigError("keyword task needs at least two classes");
  if (cfg_.groups_per_class == 0 || cfg_.synonyms_per_group == 0) {
    throw ConfigError("keyword task needs keywords");
  }
  if (cfg_.min_keywords == 0 || cfg_.min_keywords > cfg_.max_keywords ||
      cfg_.min_fillers > cfg_.max_fillers) {
    throw ConfigError("keyword task length bounds are inconsistent");
  }
  if (cfg_.max_distractors >= cfg_.min_keywords) {
    throw ConfigError("distractor keywords must stay below min_keywords");
  }
  if (cfg_.max_fillers > 0 && cfg_.filler_words == 0) {
    throw ConfigError("keyword task needs filler words");
  }

  std::mt19937_64 rng(cfg_.vocabulary_seed);
  std::set<std::string> used;
  auto fresh = [&] {
    for (;;) {
      std::string w = make_word(rng);
      if (!StopwordList::builtin().contains(w) && used.insert(w).second) return w;
    }
  };

  keywords_.resize(cfg_.classes);
  for (std::size_t c = 0; c < cfg_.classes; ++c) {
    keywords_[c].resize(cfg_.groups_per_class);
    for (auto& group : keywords_[c]) {
      for (std::size_t s = 0; s < cfg_.synonyms_per_group; ++s) {
        group.push_back(fresh());
        keyword_class_.emplace(group.back(), c);
      }
      if (group.size() > 1) lexicon_.add_group(group);
    }
  }
  for (std::size_t i = 0; i < cfg_.filler_words; ++i) fillers_.push_back(fresh());
  if (cfg_.filler_group_size > 1) {
    for (std::size_t i = 0; i + cfg_.filler_group_size <= fillers_.size();
         i += cfg_.filler_group_size) {
      lexicon_.add_group(std::vector<std::string>(
          fillers_.begin() + static_cast<std::ptrdiff_t>(i),
          fillers_.begin() + static_cast<std::ptrdiff_t>(i + cfg_.filler_group_size)));
    }
  }
}

std::vector<std::string> KeywordTask::label_names() const {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < cfg_.classes; ++c) names.push_back("topic" + std::to_string(c));
  return names;
}

Dataset KeywordTask::generate(std::size_t n, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  Dataset ds;
  ds.labels = label_names();
  std::uniform_int_distribution<std::size_t> pick_class(0, cfg_.classes - 1);
  std::uniform_int_distribution<std::size_t> pick_group(0, cfg_.groups_per_class - 1);
  std::uniform_int_distribution<std::size_t> pick_syn(0, cfg_.synonyms_per_group - 1);
  std::uniform_int_distribution<std::size_t> n_kw(cfg_.min_keywords, cfg_.max_keywords);
  std::uniform_int_distribution<std::size_t> n_fill(cfg_.min_fillers, cfg_.max_fillers);
  std::uniform_int_distribution<std::size_t> pick_filler(0, fillers_.empty() ? 0 : fillers_.size() - 1);
  std::uniform_int_distribution<std::size_t> n_dis(0, cfg_.max_distractors);
  std::uniform_int_distribution<std::size_t> pick_other(1, cfg_.classes - 1);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = pick_class(rng);
    std::vector<std::string> words;
    const std::size_t kw = n_kw(rng);
    for (std::size_t k = 0; k < kw; ++k) words.push_back(keywords_[label][pick_group(rng)][pick_syn(rng)]);
    const std::size_t dis = n_dis(rng);
    for (std::size_t d = 0; d < dis; ++d) {
      const std::size_t other = (label + pick_other(rng)) % cfg_.classes;
      words.push_back(keywords_[other][pick_group(rng)][pick_syn(rng)]);
    }
    const std::size_t fill = n_fill(rng);
    for (std::size_t f = 0; f < fill; ++f) words.push_back(fillers_[pick_filler(rng)]);
    std::shuffle(words.begin(), words.end(), rng);
    ds.samples.push_back(LabeledText{join_tokens(words), label, 0});
  }
  return ds;
}

std::optional<std::size_t> KeywordTask::label_of(const TokenizedText& text) const {
  std::vector<std::size_t> counts(cfg_.classes, 0);
  for (const auto& tok : text.tokens) {
    auto it = keyword_class_.find(tok);
    if (it != keyword_class_.end()) ++counts[it->second];
  }
  const auto best = std::max_element(counts.begin(), counts.end());
  if (*best == 0 || std::count(counts.begin(), counts.end(), *best) > 1) return std::nullopt;
  return static_cast<std::size_t>(best - counts.begin());
}

LabelingOracle KeywordTask::oracle() const {
  return [this](const TokenizedText& text) { return label_of(text); };
}

}  // namespace epida
