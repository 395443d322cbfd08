#include "epida/seas.h"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

#include "epida/errors.h"
#include "oracles.h"

namespace epida {
namespace {

TokenizedText tt(std::string_view s) { return TokenizedText::from_string(s); }

// Fixed distribution per canonical text.
class TableScorer final : public ProbabilityScorer {
 public:
  explicit TableScorer(std::map<std::string, std::vector<double>> table) : table_(std::move(table)) {}
  std::size_t classes() const override { return table_.begin()->second.size(); }
  std::vector<ProbVector> predict(std::span<const TokenizedText> texts) const override {
    std::vector<ProbVector> out;
    for (const auto& t : texts) out.push_back(ProbVector::from(table_.at(t.canonical())));
    return out;
  }

 private:
  std::map<std::string, std::vector<double>> table_;
};

// Hands back a fixed list regardless of input.
class ListAugmenter final : public Augmenter {
 public:
  explicit ListAugmenter(std::vector<std::string> texts) {
    for (const auto& s : texts) out_.push_back(tt(s));
  }
  std::vector<TokenizedText> generate(const TokenizedText&, std::size_t, std::uint64_t) const override {
    return out_;
  }

 private:
  std::vector<TokenizedText> out_;
};

class VerbatimAugmenter final : public Augmenter {
 public:
  std::vector<TokenizedText> generate(const TokenizedText& text, std::size_t count,
                                      std::uint64_t) const override {
    return std::vector<TokenizedText>(count, text);
  }
};

class FailingAugmenter final : public Augmenter {
 public:
  std::vector<TokenizedText> generate(const TokenizedText&, std::size_t, std::uint64_t) const override {
    throw std::runtime_error("backend offline");
  }
};

Candidate scored(double s_div, double s_qua, std::size_t pool_index,
                 const CombineScheme& scheme = CombineScheme::add()) {
  Candidate c;
  c.s_div = s_div;
  c.s_qua = s_qua;
  c.s_tot = combine(s_div, s_qua, scheme);
  c.pool_index = pool_index;
  c.text = tt("c" + std::to_string(pool_index));
  return c;
}

std::vector<std::size_t> indices(const std::vector<Candidate>& v) {
  std::vector<std::size_t> out;
  for (const auto& c : v) out.push_back(c.pool_index);
  return out;
}

std::vector<Candidate> pool_from_totals(const std::vector<double>& totals) {
  std::vector<Candidate> pool;
  for (std::size_t i = 0; i < totals.size(); ++i) {
    Candidate c;
    c.s_tot = totals[i];
    c.pool_index = i;
    c.text = tt("t" + std::to_string(i));
    pool.push_back(c);
  }
  return pool;
}

TEST(SeasConfig, DefaultsAndValidation) {
  SeasConfig cfg;
  EXPECT_EQ(cfg.m, 3u);
  EXPECT_EQ(cfg.k, 3u);
  EXPECT_EQ(cfg.pool_size(), 9u);
  EXPECT_EQ(cfg.scheme, CombineScheme::add());
  EXPECT_FALSE(cfg.dedup);
  cfg.m = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.k = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.eps = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(ScoreCandidates, SingleCandidatePoolIsDegenerate) {
  TableScorer scorer({{"src", {0.2, 0.8}}, {"cand", {0.6, 0.4}}});
  const auto pool = score_candidates(scorer, Sample{tt("src"), 1}, 0, std::vector{tt("cand")}, {});
  ASSERT_EQ(pool.size(), 1u);
  EXPECT_EQ(pool[0].s_div, 0.0);
  EXPECT_EQ(pool[0].s_qua, 0.0);
  EXPECT_EQ(pool[0].s_tot, 0.0);
  EXPECT_GT(pool[0].s_div_raw, 0.0);
}

TEST(ScoreCandidates, RawScoresFollowDefinitions) {
  const std::vector<double> zt{0.1, 0.2, 0.7}, z1{0.3, 0.3, 0.4}, z2{0.6, 0.3, 0.1};
  TableScorer scorer({{"src", zt}, {"a", z1}, {"b", z2}, {"src copy", zt}});
  const Sample src{tt("src"), 2};
  const auto pool = score_candidates(scorer, src, 4, std::vector{tt("a"), tt("b"), tt("src copy")}, {});
  const OneHotLabel y(2, 3);
  const auto p = [](const std::vector<double>& v) { return ProbVector::from(v); };
  EXPECT_EQ(pool[0].s_div_raw, rem_score(p(z1), y));
  EXPECT_EQ(pool[1].s_qua_raw, cem_score(p(z2), p(zt)));
  // A candidate predicted like the source carries the source's own REM score.
  EXPECT_EQ(pool[2].s_div_raw, rem_score(p(zt), y));
  EXPECT_EQ(pool[2].s_div, 0.0);
  for (const auto& c : pool) {
    EXPECT_EQ(c.source_index, 4u);
    EXPECT_EQ(c.label, 2u);
    EXPECT_GE(c.s_div, 0.0);
    EXPECT_LE(c.s_div, 1.0);
    EXPECT_GE(c.s_qua, 0.0);
    EXPECT_LE(c.s_qua, 1.0);
    EXPECT_EQ(c.s_tot, c.s_div + c.s_qua);
  }
  EXPECT_THROW(score_candidates(scorer, src, 0, std::vector<TokenizedText>{}, {}), DomainError);
}

TEST(ScoreCandidates, SalientSubstitutionDeletionAndMixedEdit) {
  // Source: positive with confidence 0.8. The salient-word swap makes the
  // model unsure, the neutral deletion barely moves it, the mixed edit sits
  // in between on both axes and wins on the combined score.
  TableScorer scorer({{"really excited for it", {0.05, 0.15, 0.80}},
                      {"really mad for it", {0.40, 0.40, 0.20}},
                      {"excited for it", {0.05, 0.14, 0.81}},
                      {"really guard excited", {0.55, 0.21, 0.24}}});
  const auto pool = score_candidates(
      scorer, Sample{tt("really excited for it"), 2}, 0,
      std::vector{tt("really mad for it"), tt("excited for it"), tt("really guard excited")}, {});
  EXPECT_GT(pool[0].s_div, 0.9);
  EXPECT_LT(pool[0].s_qua, 0.1);
  EXPECT_LT(pool[1].s_div, 0.1);
  EXPECT_GT(pool[1].s_qua, 0.9);
  EXPECT_GT(pool[2].s_div, 0.1);
  EXPECT_LT(pool[2].s_div, 0.9);
  EXPECT_GT(pool[2].s_qua, 0.1);
  EXPECT_LT(pool[2].s_qua, 0.9);
  EXPECT_GT(pool[2].s_tot, pool[0].s_tot);
  EXPECT_GT(pool[2].s_tot, pool[1].s_tot);
  EXPECT_EQ(select_top_m(pool, 1)[0].pool_index, 2u);
}

TEST(ScoreCandidates, ScorerRowCountMismatchIsProtocolError) {
  class ShortScorer final : public ProbabilityScorer {
   public:
    std::size_t classes() const override { return 2; }
    std::vector<ProbVector> predict(std::span<const TokenizedText>) const override {
      return {ProbVector::uniform(2)};
    }
  } scorer;
  EXPECT_THROW(score_candidates(scorer, Sample{tt("x"), 0}, 0, std::vector{tt("y")}, {}), ProtocolError);
}

TEST(SelectTopM, Examples) {
  EXPECT_EQ(indices(select_top_m(pool_from_totals({0.3, 0.9, 0.5}), 2)), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(indices(select_top_m(pool_from_totals({0.4, 0.4, 0.4, 0.4}), 2)),
            (std::vector<std::size_t>{0, 1}));
  EXPECT_THROW(select_top_m(pool_from_totals({0.1, 0.2}), 3), DomainError);
}

TEST(SelectTopM, MatchesBruteForceOracle) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng() % 12;
    const std::size_t m = 1 + rng() % n;
    std::vector<double> totals(n);
    // Half of the pools draw from a tiny alphabet to force ties.
    const bool tied = t % 2 == 0;
    for (double& v : totals) {
      v = tied ? static_cast<double>(rng() % 3) * 0.5
               : std::uniform_real_distribution<double>(0, 2)(rng);
    }
    EXPECT_EQ(indices(select_top_m(pool_from_totals(totals), m)),
              testing::brute_force_top_m(totals, m));
  }
}

TEST(SelectTopM, ExhaustiveTieBreakOnSmallPools) {
  // Every score vector over {0, 1, 2} of length 1..6 and every m.
  for (std::size_t n = 1; n <= 6; ++n) {
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= 3;
    for (std::size_t code = 0; code < combos; ++code) {
      std::vector<double> totals(n);
      std::size_t c = code;
      for (double& v : totals) {
        v = static_cast<double>(c % 3);
        c /= 3;
      }
      for (std::size_t m = 1; m <= n; ++m) {
        ASSERT_EQ(indices(select_top_m(pool_from_totals(totals), m)),
                  testing::brute_force_top_m(totals, m));
      }
    }
  }
}

TEST(SelectTopM, IronySupplementaryPoolPicksMarkedRows) {
  // Normalized scores of the nine "A wonderful day of starting work at 6am"
  // candidates as printed; rows 4, 6 and 7 are the marked selections.
  const std::vector<std::pair<double, double>> rows{{0.43, 0.48}, {0.21, 0.73}, {0.75, 0.18},
                                                    {0.39, 0.53}, {0.92, 0.07}, {0.56, 0.35},
                                                    {1.00, 0.00}, {0.87, 0.12}, {0.75, 0.18}};
  std::vector<Candidate> pool;
  for (std::size_t i = 0; i < rows.size(); ++i) pool.push_back(scored(rows[i].first, rows[i].second, i));
  const auto picked = select_top_m(pool, 3);
  EXPECT_EQ(picked[0].pool_index, 6u);
  EXPECT_NEAR(picked[0].s_tot, 1.00, 1e-12);
  EXPECT_NEAR(picked[1].s_tot, 0.99, 1e-12);
  EXPECT_NEAR(picked[2].s_tot, 0.99, 1e-12);
  const auto got = indices(picked);
  EXPECT_EQ(std::set<std::size_t>(got.begin(), got.end()), (std::set<std::size_t>{4, 6, 7}));
}

TEST(SelectTopM, SentimentSupplementaryPoolPicksMarkedRows) {
  // "I'm about to eat four hot dogs ..." pool: marked rows have s_tot 1.04,
  // 1.02 and the first of three 1.00 rows, which the index tie-break picks.
  const std::vector<std::pair<double, double>> rows{{0.10, 0.83}, {0.17, 0.70}, {0.00, 1.00},
                                                    {0.06, 0.98}, {0.24, 0.58}, {0.00, 0.98},
                                                    {0.03, 0.99}, {1.00, 0.00}, {0.00, 1.00}};
  std::vector<Candidate> pool;
  for (std::size_t i = 0; i < rows.size(); ++i) pool.push_back(scored(rows[i].first, rows[i].second, i));
  EXPECT_EQ(indices(select_top_m(pool, 3)), (std::vector<std::size_t>{3, 6, 2}));
}

TEST(SelectTopM, DedupSkipsRepeatsWhileDistinctCandidatesRemain) {
  auto pool = pool_from_totals({0.9, 0.8, 0.7, 0.1});
  pool[1].text = pool[0].text;
  EXPECT_EQ(indices(select_top_m(pool, 2, false)), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(indices(select_top_m(pool, 2, true)), (std::vector<std::size_t>{0, 2}));
  for (auto& c : pool) c.text = tt("same");
  EXPECT_EQ(indices(select_top_m(pool, 3, true)), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Selection, InvariantUnderPositiveAffineRawTransforms) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> raw(-3, 3), scale(0.1, 10), shift(-20, 20);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + rng() % 11;
    const std::size_t m = 1 + rng() % n;
    std::vector<Candidate> pool(n);
    for (std::size_t i = 0; i < n; ++i) {
      pool[i].s_div_raw = raw(rng);
      pool[i].s_qua_raw = raw(rng);
      pool[i].pool_index = i;
    }
    const auto scheme = t % 3 == 0 ? CombineScheme::weighted(0.3) : CombineScheme::add();
    auto base = pool;
    normalize_pool(base, scheme);
    const double a = scale(rng), b = shift(rng);
    auto moved = pool;
    for (auto& c : moved) {
      if (t % 2 == 0) {
        c.s_div_raw = a * c.s_div_raw + b;
      } else {
        c.s_qua_raw = a * c.s_qua_raw + b;
      }
    }
    normalize_pool(moved, scheme);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(moved[i].s_div, base[i].s_div, 1e-9);
      EXPECT_NEAR(moved[i].s_qua, base[i].s_qua, 1e-9);
    }
    // Rounding at the 1e-16 level may reorder exact ties, so compare the
    // selection on scores rounded well above that noise.
    auto rounded = [](std::vector<Candidate> v) {
      for (auto& c : v) c.s_tot = std::round(c.s_tot * 1e9) / 1e9;
      return v;
    };
    EXPECT_EQ(indices(select_top_m(rounded(base), m)), indices(select_top_m(rounded(moved), m)));
  }
}

TEST(Selection, AddAndHalfWeightedSelectSameSets) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> raw(0, 5);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng() % 12;
    const std::size_t m = 1 + rng() % n;
    std::vector<Candidate> pool(n);
    for (std::size_t i = 0; i < n; ++i) {
      pool[i].s_div_raw = raw(rng);
      pool[i].s_qua_raw = raw(rng);
      pool[i].pool_index = i;
    }
    auto add = pool, half = pool;
    normalize_pool(add, CombineScheme::add());
    normalize_pool(half, CombineScheme::weighted(0.5));
    EXPECT_EQ(indices(select_top_m(add, m)), indices(select_top_m(half, m)));
  }
}

TEST(Selection, RemOnlyAndCemOnlyUseOneScoreFamily) {
  auto pool = std::vector<Candidate>(3);
  pool[0].s_div_raw = 3;
  pool[0].s_qua_raw = 0;
  pool[1].s_div_raw = 0;
  pool[1].s_qua_raw = 3;
  pool[2].s_div_raw = 2;
  pool[2].s_qua_raw = 2;
  for (std::size_t i = 0; i < 3; ++i) pool[i].pool_index = i;
  auto rem = pool, cem = pool;
  normalize_pool(rem, CombineScheme::weighted(1.0));
  normalize_pool(cem, CombineScheme::weighted(0.0));
  EXPECT_EQ(select_top_m(rem, 1)[0].pool_index, 0u);
  EXPECT_EQ(select_top_m(cem, 1)[0].pool_index, 1u);
  for (const auto& c : rem) EXPECT_EQ(c.s_tot, c.s_div);
  for (const auto& c : cem) EXPECT_EQ(c.s_tot, c.s_qua);
}

std::shared_ptr<const Model> small_model(std::uint64_t seed) {
  FeaturizerConfig f;
  f.dim = 1u << 10;
  auto model = std::make_shared<Model>(f, std::vector<std::string>{"neg", "pos"});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> w(0.0, 1.0);
  for (double& v : model->weights()) v = w(rng);
  return model;
}

TEST(EpidaAugment, OutputsComeFromThePoolWithSourceLabel) {
  ModelScorer scorer(small_model(1));
  EdaAugmenter aug;
  const Sample src{tt("i am so happy and excited about this wonderful day"), 1};
  SeasConfig cfg;
  const auto out = epida_augment(scorer, src, 7, aug, cfg, 99);
  ASSERT_EQ(out.size(), 3u);
  const auto pool = aug.generate(src.text, cfg.pool_size(), 99);
  for (const auto& c : out) {
    EXPECT_EQ(c.label, 1u);
    EXPECT_EQ(c.source_index, 7u);
    ASSERT_LT(c.pool_index, pool.size());
    EXPECT_EQ(c.text, pool[c.pool_index]);
  }
  EXPECT_GE(out[0].s_tot, out[1].s_tot);
  EXPECT_GE(out[1].s_tot, out[2].s_tot);
}

TEST(EpidaAugment, DeterministicForFixedSeedAndModel) {
  ModelScorer scorer(small_model(2));
  EdaAugmenter aug;
  const Sample src{tt("what a wonderful and lovely afternoon with friends"), 0};
  const auto a = epida_augment(scorer, src, 0, aug, {}, 5);
  const auto b = epida_augment(scorer, src, 0, aug, {}, 5);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].text, b[i].text);
    EXPECT_EQ(a[i].s_tot, b[i].s_tot);
    EXPECT_EQ(a[i].s_div_raw, b[i].s_div_raw);
    EXPECT_EQ(a[i].s_qua_raw, b[i].s_qua_raw);
  }
}

TEST(EpidaAugment, KOneReturnsWholePoolReordered) {
  ModelScorer scorer(small_model(3));
  EdaAugmenter aug;
  const Sample src{tt("the quick brown fox jumps over the lazy dog"), 1};
  SeasConfig cfg;
  cfg.m = 4;
  cfg.k = 1;
  const auto out = epida_augment(scorer, src, 0, aug, cfg, 11);
  std::set<std::size_t> seen;
  for (const auto& c : out) seen.insert(c.pool_index);
  EXPECT_EQ(seen, (std::set<std::size_t>{0, 1, 2, 3}));
  for (std::size_t i = 1; i < out.size(); ++i) EXPECT_GE(out[i - 1].s_tot, out[i].s_tot);
}

TEST(EpidaAugment, AcceptsAnyConformingAugmenter) {
  ModelScorer scorer(small_model(4));
  const Sample src{tt("plain text here"), 0};
  const auto out = epida_augment(scorer, src, 0, VerbatimAugmenter{}, {}, 0);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(out[i].text, src.text);
    EXPECT_EQ(out[i].pool_index, i);
    EXPECT_EQ(out[i].s_tot, 0.0);
  }
}

TEST(EpidaAugment, AugmenterFailureCarriesSampleContext) {
  ModelScorer scorer(small_model(5));
  try {
    epida_augment(scorer, Sample{tt("some words"), 0}, 42, FailingAugmenter{}, {}, 0);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("sample 42"), std::string::npos);
    EXPECT_NE(what.find("backend offline"), std::string::npos);
  }
  EXPECT_THROW(epida_augment(scorer, Sample{tt("x"), 0}, 0, ListAugmenter({"a", "b"}), {}, 0),
               DomainError);
}

TEST(RandomSelectM, DistinctPoolMembersAndDeterministic) {
  const auto pool = pool_from_totals({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  const auto a = indices(random_select_m(pool, 3, 8));
  EXPECT_EQ(a, indices(random_select_m(pool, 3, 8)));
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 3u);
  EXPECT_THROW(random_select_m(pool, 10, 0), DomainError);
}

TEST(ModelScorer, ConcurrentPredictionsMatchSerial) {
  ModelScorer scorer(small_model(6));
  std::vector<TokenizedText> texts;
  for (int i = 0; i < 64; ++i) texts.push_back(tt("text number " + std::to_string(i)));
  const auto serial = scorer.predict(texts);
  std::vector<std::vector<ProbVector>> results(4);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] { results[t] = scorer.predict(texts); });
  }
  for (auto& th : threads) th.join();
  for (const auto& r : results) EXPECT_EQ(r, serial);
}

}  // namespace
}  // namespace epida
