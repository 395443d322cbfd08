#include "epida/training.h"

#include <algorithm>
#include <chrono>
#include <memory>
#include <numeric>
#include <random>

#include "epida/errors.h"
#include "json.hpp"

namespace epida {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct PreparedSplit {
  std::vector<Sample> samples;
  std::vector<Example> examples;
};

PreparedSplit prepare(const Dataset& ds, const std::vector<std::size_t>& label_map,
                      const FeaturizerConfig& featurizer, const StopwordList& stopwords) {
  PreparedSplit out;
  out.samples.reserve(ds.size());
  out.examples.reserve(ds.size());
  for (const auto& s : ds.samples) {
    Sample sample{preprocess(s.text, stopwords), label_map.at(s.label)};
    out.examples.push_back(Example{featurize(sample.text, featurizer), sample.label});
    out.samples.push_back(std::move(sample));
  }
  return out;
}

std::vector<std::size_t> identity_map(std::size_t n) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  return m;
}

}  // namespace

void RunConfig::validate() const {
  seas.validate();
  train.validate();
  featurizer.validate();
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (!(data_fraction > 0.0 && data_fraction <= 1.0)) {
    throw ConfigError("data fraction must lie in (0, 1]");
  }
}

std::uint64_t augmentation_seed(std::uint64_t run_seed, std::size_t round,
                                std::size_t sample_index) {
  return splitmix64(splitmix64(run_seed) + round) ^ static_cast<std::uint64_t>(sample_index);
}

std::string TrainingReport::to_json() const {
  using nlohmann::json;
  json seeds = json::array();
  for (const auto& s : per_seed) {
    json row = {{"seed", s.seed},
                {"train_size", s.train_size},
                {"augmented_rows", s.augmented_rows},
                {"macro_f1", s.metrics.macro_f1},
                {"per_class_f1", s.metrics.per_class_f1}};
    if (s.metrics.positive_f1) row["positive_f1"] = *s.metrics.positive_f1;
    if (s.metrics.error_rate) row["error_rate"] = *s.metrics.error_rate;
    if (s.metrics.mean_distance) row["mean_distance"] = *s.metrics.mean_distance;
    seeds.push_back(std::move(row));
  }
  json out = {{"per_seed", std::move(seeds)}, {"mean_macro_f1", mean_macro_f1}};
  if (mean_error_rate) out["mean_error_rate"] = *mean_error_rate;
  if (mean_distance) out["mean_distance"] = *mean_distance;
  return out.dump(2);
}

TrainingReport run_training(const Dataset& train, const Dataset& test, const RunConfig& cfg,
                            const Augmenter& augmenter, const LabelingOracle* oracle,
                            const StopwordList& stopwords) {
  cfg.validate();
  if (train.classes() < 2) throw DomainError("training data must contain at least two classes");
  if (train.size() == 0) throw DomainError("training split is empty");

  std::vector<std::size_t> test_map;
  for (const auto& name : test.labels) test_map.push_back(train.label_index(name));
  const PreparedSplit test_split = prepare(test, test_map, cfg.featurizer, stopwords);
  std::vector<std::size_t> gold;
  for (const auto& ex : test_split.examples) gold.push_back(ex.label);

  TrainingReport report;
  double augment_seconds = 0.0;
  std::size_t augment_count = 0;
  double error_sum = 0.0, distance_sum = 0.0;
  std::size_t error_n = 0, distance_n = 0;

  for (const std::uint64_t seed : cfg.seeds) {
    try {
      const Dataset split =
          cfg.data_fraction < 1.0 ? subsample(train, cfg.data_fraction, seed) : train;
      if (split.size() == 0) throw DomainError("subsampled training split is empty");
      const PreparedSplit tr =
          prepare(split, identity_map(train.classes()), cfg.featurizer, stopwords);

      Model model(cfg.featurizer, train.labels);
      OptimizerState state = OptimizerState::for_model(model);
      TrainConfig tc = cfg.train;
      tc.seed = seed;
      pretrain(model, state, tr.examples, tc, cfg.pretrain_epochs);

      std::vector<AugmentedGroup> groups;
      std::vector<Candidate> selected_all;
      std::mt19937_64 order_rng(splitmix64(seed ^ 0xD1B54A32D192ED03ULL));
      std::vector<std::size_t> order = identity_map(tr.examples.size());

      const std::size_t rounds = cfg.selection == SelectionMode::kNone ? 0 : cfg.oa_epochs;
      for (std::size_t round = 0; round < rounds; ++round) {
        if (cfg.online || round == 0) {
          const auto t0 = std::chrono::steady_clock::now();
          ModelScorer scorer(std::make_shared<const Model>(model));
          groups.clear();
          for (std::size_t i = 0; i < tr.samples.size(); ++i) {
            const std::uint64_t aug_seed = augmentation_seed(seed, round, i);
            std::vector<Candidate> chosen;
            if (cfg.selection == SelectionMode::kEpida) {
              chosen = epida_augment(scorer, tr.samples[i], i, augmenter, cfg.seas, aug_seed);
            } else {
              const auto texts = augmenter.generate(tr.samples[i].text, cfg.seas.pool_size(), aug_seed);
              std::vector<Candidate> pool;
              for (std::size_t j = 0; j < texts.size(); ++j) {
                Candidate c;
                c.text = texts[j];
                c.source_index = i;
                c.pool_index = j;
                c.label = tr.samples[i].label;
                pool.push_back(std::move(c));
              }
              chosen = random_select_m(pool, cfg.seas.m, ~aug_seed);
            }
            AugmentedGroup g{tr.samples[i].label, {}};
            for (const auto& c : chosen) g.candidates.push_back(featurize(c.text, cfg.featurizer));
            groups.push_back(std::move(g));
            std::move(chosen.begin(), chosen.end(), std::back_inserter(selected_all));
          }
          augment_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          augment_count += tr.samples.size() * cfg.seas.m;
        }

        std::shuffle(order.begin(), order.end(), order_rng);
        for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
          const std::size_t stop = std::min(order.size(), start + tc.batch_size);
          Batch batch;
          for (std::size_t k = start; k < stop; ++k) {
            const std::size_t i = order[k];
            switch (cfg.loss) {
              case LossMode::kTotal:
                batch.originals.push_back(tr.examples[i]);
                batch.groups.push_back(groups[i]);
                break;
              case LossMode::kOriginal:
                batch.originals.push_back(tr.examples[i]);
                break;
              case LossMode::kGenerated:
                // Equal group sizes make the flattened mean equal loss_generated.
                for (const auto& f : groups[i].candidates) {
                  batch.originals.push_back(Example{f, groups[i].label});
                }
                break;
            }
          }
          train_step(model, state, batch, tc);
        }
      }

      std::vector<std::size_t> predicted;
      predicted.reserve(test_split.examples.size());
      for (const auto& ex : test_split.examples) predicted.push_back(predict_label(model, ex.features));

      SeedReport sr;
      sr.seed = seed;
      sr.train_size = tr.samples.size();
      sr.augmented_rows = selected_all.size();
      sr.metrics = evaluate_macro_f1(predicted, gold, train.classes());
      if (!selected_all.empty()) {
        const auto qd = quality_diversity_metrics(tr.samples, selected_all, cfg.featurizer, oracle);
        sr.metrics.error_rate = qd.error_rate;
        sr.metrics.mean_distance = qd.mean_distance;
        if (qd.error_rate) {
          error_sum += *qd.error_rate;
          ++error_n;
        }
        distance_sum += qd.mean_distance;
        ++distance_n;
      }
      report.mean_macro_f1 += sr.metrics.macro_f1;
      report.per_seed.push_back(std::move(sr));
    } catch (const Error& e) {
      throw Error("seed " + std::to_string(seed) + ": " + e.what());
    }
  }
  report.mean_macro_f1 /= static_cast<double>(report.per_seed.size());
  if (error_n > 0) report.mean_error_rate = error_sum / static_cast<double>(error_n);
  if (distance_n > 0) report.mean_distance = distance_sum / static_cast<double>(distance_n);
  if (augment_seconds > 0.0) {
    report.augment_samples_per_second = static_cast<double>(augment_count) / augment_seconds;
    for (auto& s : report.per_seed) s.metrics.samples_per_second = report.augment_samples_per_second;
  }
  return report;
}

}  // namespace epida
