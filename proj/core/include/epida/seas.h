#pragma once

// Sample evaluation and selection: generate K*m candidates for one labeled
// sample, score each for diversity (REM) and quality (CEM) against the
// classifier's predictions, min-max normalize both score families over the
// pool, combine, and keep the m best.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "epida/augment.h"
#include "epida/classifier.h"
#include "epida/infotheory.h"
#include "epida/text.h"

namespace epida {

struct Sample {
  TokenizedText text;
  std::size_t label = 0;
};

struct Candidate {
  TokenizedText text;
  double s_div_raw = 0.0;
  double s_qua_raw = 0.0;
  double s_div = 0.0;
  double s_qua = 0.0;
  double s_tot = 0.0;
  std::size_t source_index = 0;
  std::size_t pool_index = 0;
  std::size_t label = 0;
};

struct SeasConfig {
  std::size_t m = 3;
  std::size_t k = 3;
  CombineScheme scheme = CombineScheme::add();
  double eps = kDefaultClampEps;
  // Skip candidates whose text repeats an already selected one, as long as
  // enough distinct candidates exist.
  bool dedup = false;

  std::size_t pool_size() const noexcept { return m * k; }
  void validate() const;
};

// Source of class distributions for texts: the builtin model or a remote
// service.
class ProbabilityScorer {
 public:
  virtual ~ProbabilityScorer() = default;
  virtual std::size_t classes() const = 0;
  virtual std::vector<ProbVector> predict(std::span<const TokenizedText> texts) const = 0;
};

// Reads an immutable model snapshot; safe to share across threads.
class ModelScorer final : public ProbabilityScorer {
 public:
  explicit ModelScorer(std::shared_ptr<const Model> snapshot);

  std::size_t classes() const override { return model_->classes(); }
  std::vector<ProbVector> predict(std::span<const TokenizedText> texts) const override;

  const Model& model() const noexcept { return *model_; }

 private:
  std::shared_ptr<const Model> model_;
};

// Normalizes the raw score families of one pool and fills s_div, s_qua,
// s_tot in place.
void normalize_pool(std::span<Candidate> pool, const CombineScheme& scheme);

// Raw REM/CEM scores for every candidate, then normalize_pool. The source's
// prediction is computed once per pool.
std::vector<Candidate> score_candidates(const ProbabilityScorer& scorer, const Sample& source,
                                        std::size_t source_index,
                                        std::span<const TokenizedText> candidates,
                                        const SeasConfig& cfg);

// m candidates with the largest s_tot, ordered by descending s_tot then
// ascending pool position. Throws DomainError if the pool is smaller than m.
std::vector<Candidate> select_top_m(std::span<const Candidate> pool, std::size_t m,
                                    bool dedup = false);

// Generates K*m candidates with the augmenter, scores them and selects m.
std::vector<Candidate> epida_augment(const ProbabilityScorer& scorer, const Sample& source,
                                     std::size_t source_index, const Augmenter& augmenter,
                                     const SeasConfig& cfg, std::uint64_t seed);

// Uniform random choice of m pool members (baseline for selection ablations).
std::vector<Candidate> random_select_m(std::span<const Candidate> pool, std::size_t m,
                                       std::uint64_t seed);

}  // namespace epida
