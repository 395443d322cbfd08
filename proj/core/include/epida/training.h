#pragma once

// Pre-train -> online augmentation training loop.
//
// Per seed:
//   1. subsample the training split (data_fraction) and pre-train on the
//      original loss for pretrain_epochs;
//   2. for each of oa_epochs: snapshot the model, select m candidates per
//      training sample with the snapshot as scorer, then train one epoch on
//      loss_original + loss_generated. With online=false the first round's
//      selection is reused for every epoch;
//   3. report Macro-F1 on the test split.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epida/augment.h"
#include "epida/classifier.h"
#include "epida/dataset.h"
#include "epida/metrics.h"
#include "epida/seas.h"

namespace epida {

enum class SelectionMode {
  kNone,    // no augmentation; step 2 is skipped
  kEpida,   // REM/CEM scoring + top-m
  kRandom,  // m uniformly random members of the same pools
};

// Objective of the augmentation epochs (loss-function ablation).
enum class LossMode {
  kTotal,      // loss_original + loss_generated
  kOriginal,   // loss_original only; selected candidates are ignored
  kGenerated,  // loss_generated only
};

struct RunConfig {
  SeasConfig seas;
  TrainConfig train;
  FeaturizerConfig featurizer;
  std::size_t pretrain_epochs = 10;
  std::size_t oa_epochs = 10;
  bool online = true;
  SelectionMode selection = SelectionMode::kEpida;
  LossMode loss = LossMode::kTotal;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  double data_fraction = 1.0;

  void validate() const;
};

struct SeedReport {
  std::uint64_t seed = 0;
  std::size_t train_size = 0;
  std::size_t augmented_rows = 0;  // candidates selected over all rounds
  MetricsReport metrics;
};

struct TrainingReport {
  std::vector<SeedReport> per_seed;
  double mean_macro_f1 = 0.0;
  std::optional<double> mean_error_rate;
  std::optional<double> mean_distance;
  // Wall-clock; excluded from to_json() so reports stay reproducible.
  double augment_samples_per_second = 0.0;

  // Deterministic JSON rendering (no timing fields).
  std::string to_json() const;
};

// Seed handed to the augmenter for one sample of one augmentation round.
std::uint64_t augmentation_seed(std::uint64_t run_seed, std::size_t round, std::size_t sample_index);

// The scorer is always the builtin classifier here. The oracle, when given,
// feeds error_rate; mean_distance is always computed.
TrainingReport run_training(const Dataset& train, const Dataset& test, const RunConfig& cfg,
                            const Augmenter& augmenter, const LabelingOracle* oracle = nullptr,
                            const StopwordList& stopwords = StopwordList::builtin());

}  // namespace epida
