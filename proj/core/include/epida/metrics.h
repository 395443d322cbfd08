#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "epida/classifier.h"
#include "epida/seas.h"

namespace epida {

struct MetricsReport {
  double macro_f1 = 0.0;
  std::vector<double> per_class_f1;
  std::optional<double> positive_f1;  // binary tasks: F1 of class 1
  std::optional<double> error_rate;
  std::optional<double> mean_distance;
  double samples_per_second = 0.0;
};

// Per-class F1 from the confusion matrix; a class absent from both gold and
// predictions scores 0. Macro-F1 is the unweighted mean over `classes`.
MetricsReport evaluate_macro_f1(std::span<const std::size_t> predictions,
                                std::span<const std::size_t> gold, std::size_t classes);

// Returns the true class of a text, or nullopt when it cannot tell.
using LabelingOracle = std::function<std::optional<std::size_t>(const TokenizedText&)>;

struct QualityDiversity {
  std::optional<double> error_rate;
  double mean_distance = 0.0;
  std::size_t evaluated = 0;  // pairs contributing to mean_distance
};

// error_rate: fraction of candidates the oracle labels differently from
// their source (no oracle: absent). mean_distance: mean Euclidean distance
// between L2-normalized features of each candidate and its source,
// excluding oracle-wrong pairs. Candidates refer to `originals` through
// source_index.
QualityDiversity quality_diversity_metrics(std::span<const Sample> originals,
                                           std::span<const Candidate> selected,
                                           const FeaturizerConfig& featurizer,
                                           const LabelingOracle* oracle = nullptr);

}  // namespace epida
