#include "epida/augment.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "epida/errors.h"

namespace epida {
namespace {

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::vector<std::size_t> eligible_positions(const TokenizedText& text,
                                            const SynonymLexicon& lexicon,
                                            const StopwordList& stopwords) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < text.tokens.size(); ++i) {
    const auto& tok = text.tokens[i];
    if (!stopwords.contains(tok) && lexicon.has_synonyms(tok)) out.push_back(i);
  }
  return out;
}

TokenizedText retokenized(std::vector<std::string> tokens) {
  return TokenizedText::from_tokens(std::move(tokens));
}

}  // namespace

std::size_t EdaConfig::changes_for(std::size_t token_count) const {
  const auto n = static_cast<std::size_t>(std::lround(alpha_eda * static_cast<double>(token_count)));
  return std::max<std::size_t>(1, n);
}

void EdaConfig::validate() const {
  if (!(alpha_eda > 0.0 && alpha_eda <= 1.0)) {
    throw ConfigError("alpha_eda must lie in (0,1], got " + std::to_string(alpha_eda));
  }
  if (!(p_delete >= 0.0 && p_delete <= 1.0)) {
    throw ConfigError("p_delete must lie in [0,1], got " + std::to_string(p_delete));
  }
  if ((ops_enabled & 0x0F) == 0) throw ConfigError("at least one augmentation op must be enabled");
}

TokenizedText synonym_replace(const TokenizedText& text, std::size_t n, Rng& rng,
                              const SynonymLexicon& lexicon, const StopwordList& stopwords) {
  auto positions = eligible_positions(text, lexicon, stopwords);
  if (positions.empty() || n == 0) return text;
  std::shuffle(positions.begin(), positions.end(), rng);
  std::vector<std::string> tokens = text.tokens;
  const std::size_t changes = std::min(n, positions.size());
  for (std::size_t k = 0; k < changes; ++k) {
    const auto& synonyms = lexicon.lookup(tokens[positions[k]]);
    tokens[positions[k]] = synonyms[uniform_index(rng, synonyms.size())];
  }
  return retokenized(std::move(tokens));
}

TokenizedText random_insert(const TokenizedText& text, std::size_t n, Rng& rng,
                            const SynonymLexicon& lexicon, const StopwordList& stopwords) {
  std::vector<std::string> tokens = text.tokens;
  bool changed = false;
  for (std::size_t k = 0; k < n; ++k) {
    TokenizedText current{tokens, {}};
    const auto positions = eligible_positions(current, lexicon, stopwords);
    if (positions.empty()) break;
    const auto& source = tokens[positions[uniform_index(rng, positions.size())]];
    const auto& synonyms = lexicon.lookup(source);
    std::string inserted = synonyms[uniform_index(rng, synonyms.size())];
    const std::size_t at = uniform_index(rng, tokens.size() + 1);
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(at), std::move(inserted));
    changed = true;
  }
  return changed ? retokenized(std::move(tokens)) : text;
}

TokenizedText random_swap(const TokenizedText& text, std::size_t n, Rng& rng) {
  if (text.tokens.size() < 2) return text;
  std::vector<std::string> tokens = text.tokens;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = uniform_index(rng, tokens.size());
    std::size_t j = uniform_index(rng, tokens.size() - 1);
    if (j >= i) ++j;
    std::swap(tokens[i], tokens[j]);
  }
  return retokenized(std::move(tokens));
}

TokenizedText random_delete(const TokenizedText& text, double p_delete, Rng& rng) {
  if (text.tokens.empty()) return text;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::string> kept;
  for (const auto& tok : text.tokens) {
    if (!(coin(rng) < p_delete)) kept.push_back(tok);
  }
  if (kept.empty()) kept.push_back(text.tokens[uniform_index(rng, text.tokens.size())]);
  return retokenized(std::move(kept));
}

std::vector<TokenizedText> generate_candidates(const TokenizedText& text, std::size_t count,
                                               const EdaConfig& cfg,
                                               const SynonymLexicon& lexicon,
                                               const StopwordList& stopwords) {
  cfg.validate();
  if (text.empty()) throw DomainError("cannot augment an empty text");
  if (count == 0) throw DomainError("candidate count must be at least 1");

  std::vector<EdaOp> ops;
  for (EdaOp op : {EdaOp::kSynonymReplace, EdaOp::kRandomInsert, EdaOp::kRandomSwap,
                   EdaOp::kRandomDelete}) {
    if (cfg.enabled(op)) ops.push_back(op);
  }

  Rng rng(cfg.seed);
  const std::size_t n = cfg.changes_for(text.size());
  std::vector<TokenizedText> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    switch (ops[uniform_index(rng, ops.size())]) {
      case EdaOp::kSynonymReplace:
        out.push_back(synonym_replace(text, n, rng, lexicon, stopwords));
        break;
      case EdaOp::kRandomInsert:
        out.push_back(random_insert(text, n, rng, lexicon, stopwords));
        break;
      case EdaOp::kRandomSwap:
        out.push_back(random_swap(text, n, rng));
        break;
      case EdaOp::kRandomDelete:
        out.push_back(random_delete(text, cfg.p_delete, rng));
        break;
    }
  }
  return out;
}

EdaAugmenter::EdaAugmenter(EdaConfig cfg, std::shared_ptr<const SynonymLexicon> lexicon,
                           std::shared_ptr<const StopwordList> stopwords)
    : cfg_(cfg), lexicon_(std::move(lexicon)), stopwords_(std::move(stopwords)) {
  cfg_.validate();
  if (!lexicon_ || !stopwords_) throw ConfigError("EdaAugmenter needs a lexicon and a stopword list");
}

EdaAugmenter::EdaAugmenter(EdaConfig cfg)
    : EdaAugmenter(cfg,
                   std::shared_ptr<const SynonymLexicon>(&SynonymLexicon::builtin(),
                                                         [](const SynonymLexicon*) {}),
                   std::shared_ptr<const StopwordList>(&StopwordList::builtin(),
                                                       [](const StopwordList*) {})) {}

std::vector<TokenizedText> EdaAugmenter::generate(const TokenizedText& text, std::size_t count,
                                                  std::uint64_t seed) const {
  EdaConfig cfg = cfg_;
  cfg.seed = seed;
  return generate_candidates(text, count, cfg, *lexicon_, *stopwords_);
}

}  // namespace epida
