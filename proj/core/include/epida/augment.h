#pragma once

// Rule-based candidate generation (synonym replacement, random insertion,
// random swap, random deletion) behind a pluggable augmenter interface.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "epida/lexicon.h"
#include "epida/text.h"

namespace epida {

using Rng = std::mt19937_64;

enum class EdaOp : std::uint8_t {
  kSynonymReplace = 1 << 0,
  kRandomInsert = 1 << 1,
  kRandomSwap = 1 << 2,
  kRandomDelete = 1 << 3,
};

struct EdaConfig {
  double alpha_eda = 0.1;  // fraction of tokens touched by SR/RI/RS
  double p_delete = 0.1;
  std::uint8_t ops_enabled = 0x0F;
  std::uint64_t seed = 0;

  bool enabled(EdaOp op) const noexcept {
    return (ops_enabled & static_cast<std::uint8_t>(op)) != 0;
  }
  // max(1, round(alpha_eda * token_count))
  std::size_t changes_for(std::size_t token_count) const;
  // Throws ConfigError on an out-of-range knob or an empty op set.
  void validate() const;
};

TokenizedText synonym_replace(const TokenizedText& text, std::size_t n, Rng& rng,
                              const SynonymLexicon& lexicon,
                              const StopwordList& stopwords = StopwordList::builtin());

TokenizedText random_insert(const TokenizedText& text, std::size_t n, Rng& rng,
                            const SynonymLexicon& lexicon,
                            const StopwordList& stopwords = StopwordList::builtin());

TokenizedText random_swap(const TokenizedText& text, std::size_t n, Rng& rng);

// Never returns an empty text: if every token would be deleted, one
// uniformly chosen token survives.
TokenizedText random_delete(const TokenizedText& text, double p_delete, Rng& rng);

// `count` candidates, each made by one uniformly chosen enabled op. Pure
// function of (text, count, cfg). Throws DomainError on empty text or zero
// count.
std::vector<TokenizedText> generate_candidates(
    const TokenizedText& text, std::size_t count, const EdaConfig& cfg,
    const SynonymLexicon& lexicon = SynonymLexicon::builtin(),
    const StopwordList& stopwords = StopwordList::builtin());

// Anything that turns one text into `count` non-empty candidate texts.
class Augmenter {
 public:
  virtual ~Augmenter() = default;
  virtual std::vector<TokenizedText> generate(const TokenizedText& text, std::size_t count,
                                              std::uint64_t seed) const = 0;
};

class EdaAugmenter final : public Augmenter {
 public:
  EdaAugmenter(EdaConfig cfg, std::shared_ptr<const SynonymLexicon> lexicon,
               std::shared_ptr<const StopwordList> stopwords);
  // Builtin lexicon and stopwords.
  explicit EdaAugmenter(EdaConfig cfg = {});

  std::vector<TokenizedText> generate(const TokenizedText& text, std::size_t count,
                                      std::uint64_t seed) const override;

  const EdaConfig& config() const noexcept { return cfg_; }

 private:
  EdaConfig cfg_;
  std::shared_ptr<const SynonymLexicon> lexicon_;
  std::shared_ptr<const StopwordList> stopwords_;
};

}  // namespace epida
