#include "epida/seas.h"

#include <algorithm>
#include <exception>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "epida/errors.h"

namespace epida {

void SeasConfig::validate() const {
  if (m == 0) throw ConfigError("augmentation number m must be at least 1");
  if (k == 0) throw ConfigError("amplification factor K must be at least 1");
  if (!(eps > 0.0)) throw ConfigError("clamp epsilon must be positive");
}

ModelScorer::ModelScorer(std::shared_ptr<const Model> snapshot) : model_(std::move(snapshot)) {
  if (!model_) throw ConfigError("ModelScorer needs a model");
}

std::vector<ProbVector> ModelScorer::predict(std::span<const TokenizedText> texts) const {
  std::vector<ProbVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(predict_proba(*model_, t));
  return out;
}

void normalize_pool(std::span<Candidate> pool, const CombineScheme& scheme) {
  if (pool.empty()) return;
  std::vector<double> div(pool.size()), qua(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    div[i] = pool[i].s_div_raw;
    qua[i] = pool[i].s_qua_raw;
  }
  const auto div_n = min_max_norm(div);
  const auto qua_n = min_max_norm(qua);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    pool[i].s_div = div_n[i];
    pool[i].s_qua = qua_n[i];
    pool[i].s_tot = combine(div_n[i], qua_n[i], scheme);
  }
}

std::vector<Candidate> score_candidates(const ProbabilityScorer& scorer, const Sample& source,
                                        std::size_t source_index,
                                        std::span<const TokenizedText> candidates,
                                        const SeasConfig& cfg) {
  cfg.validate();
  if (candidates.empty()) throw DomainError("no candidates to score");
  const OneHotLabel label(source.label, scorer.classes());

  std::vector<TokenizedText> texts;
  texts.reserve(candidates.size() + 1);
  texts.push_back(source.text);
  texts.insert(texts.end(), candidates.begin(), candidates.end());
  const auto probs = scorer.predict(texts);
  if (probs.size() != texts.size()) {
    throw ProtocolError("scorer returned " + std::to_string(probs.size()) +
                        " distributions for " + std::to_string(texts.size()) + " texts");
  }
  const ProbVector& zt = probs.front();

  std::vector<Candidate> pool;
  pool.reserve(candidates.size());
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const ProbVector& z = probs[j + 1];
    Candidate c;
    c.text = candidates[j];
    c.s_div_raw = rem_score(z, label, cfg.eps);
    c.s_qua_raw = cem_score(z, zt, cfg.eps);
    c.source_index = source_index;
    c.pool_index = j;
    c.label = source.label;
    pool.push_back(std::move(c));
  }
  normalize_pool(pool, cfg.scheme);
  return pool;
}

std::vector<Candidate> select_top_m(std::span<const Candidate> pool, std::size_t m, bool dedup) {
  if (pool.size() < m) {
    throw DomainError("pool of " + std::to_string(pool.size()) +
                      " candidates cannot supply m = " + std::to_string(m));
  }
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pool[a].s_tot > pool[b].s_tot;
  });

  std::vector<Candidate> out;
  out.reserve(m);
  if (!dedup) {
    for (std::size_t i = 0; i < m; ++i) out.push_back(pool[order[i]]);
    return out;
  }
  std::set<std::vector<std::string>> seen;
  std::vector<std::size_t> skipped;
  for (std::size_t idx : order) {
    if (out.size() == m) break;
    if (seen.insert(pool[idx].text.tokens).second) {
      out.push_back(pool[idx]);
    } else {
      skipped.push_back(idx);
    }
  }
  for (std::size_t k = 0; out.size() < m; ++k) out.push_back(pool[skipped[k]]);
  return out;
}

std::vector<Candidate> epida_augment(const ProbabilityScorer& scorer, const Sample& source,
                                     std::size_t source_index, const Augmenter& augmenter,
                                     const SeasConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::vector<TokenizedText> candidates;
  try {
    candidates = augmenter.generate(source.text, cfg.pool_size(), seed);
  } catch (const std::exception& e) {
    throw DomainError("augmenter failed on sample " + std::to_string(source_index) + " (\"" +
                      source.text.canonical() + "\"): " + e.what());
  }
  if (candidates.size() != cfg.pool_size()) {
    throw DomainError("augmenter returned " + std::to_string(candidates.size()) +
                      " candidates for sample " + std::to_string(source_index) + ", expected " +
                      std::to_string(cfg.pool_size()));
  }
  for (const auto& c : candidates) {
    if (c.empty()) {
      throw DomainError("augmenter returned an empty candidate for sample " +
                        std::to_string(source_index));
    }
  }
  const auto pool = score_candidates(scorer, source, source_index, candidates, cfg);
  return select_top_m(pool, cfg.m, cfg.dedup);
}

std::vector<Candidate> random_select_m(std::span<const Candidate> pool, std::size_t m,
                                       std::uint64_t seed) {
  if (pool.size() < m) throw DomainError("pool smaller than m");
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(pool[order[i]]);
  return out;
}

}  // namespace epida
