#include "epida/metrics.h"

#include <string>

#include "epida/errors.h"

namespace epida {

MetricsReport evaluate_macro_f1(std::span<const std::size_t> predictions,
                                std::span<const std::size_t> gold, std::size_t classes) {
  if (predictions.size() != gold.size()) {
    throw DomainError("predictions (" + std::to_string(predictions.size()) + ") and gold (" +
                      std::to_string(gold.size()) + ") differ in length");
  }
  if (classes == 0) throw DomainError("label space is empty");
  std::vector<std::size_t> tp(classes, 0), fp(classes, 0), fn(classes, 0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] >= classes || predictions[i] >= classes) {
      throw DomainError("label outside vocabulary at position " + std::to_string(i));
    }
    if (predictions[i] == gold[i]) {
      ++tp[gold[i]];
    } else {
      ++fp[predictions[i]];
      ++fn[gold[i]];
    }
  }
  MetricsReport report;
  report.per_class_f1.resize(classes, 0.0);
  double sum = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    const double denom = 2.0 * static_cast<double>(tp[c]) + static_cast<double>(fp[c] + fn[c]);
    report.per_class_f1[c] = denom > 0.0 ? 2.0 * static_cast<double>(tp[c]) / denom : 0.0;
    sum += report.per_class_f1[c];
  }
  report.macro_f1 = sum / static_cast<double>(classes);
  if (classes == 2) report.positive_f1 = report.per_class_f1[1];
  return report;
}

QualityDiversity quality_diversity_metrics(std::span<const Sample> originals,
                                           std::span<const Candidate> selected,
                                           const FeaturizerConfig& featurizer,
                                           const LabelingOracle* oracle) {
  QualityDiversity out;
  std::size_t wrong = 0;
  double distance_sum = 0.0;
  for (const auto& c : selected) {
    if (c.source_index >= originals.size()) {
      throw DomainError("candidate refers to source " + std::to_string(c.source_index) +
                        " but only " + std::to_string(originals.size()) + " originals exist");
    }
    const Sample& src = originals[c.source_index];
    if (c.label != src.label) {
      throw DomainError("candidate label differs from its source " +
                        std::to_string(c.source_index));
    }
    if (oracle) {
      const auto truth = (*oracle)(c.text);
      if (!truth || *truth != src.label) {
        ++wrong;
        continue;
      }
    }
    distance_sum += normalized_distance(featurize(src.text, featurizer),
                                        featurize(c.text, featurizer));
    ++out.evaluated;
  }
  if (oracle && !selected.empty()) {
    out.error_rate = static_cast<double>(wrong) / static_cast<double>(selected.size());
  }
  if (out.evaluated > 0) out.mean_distance = distance_sum / static_cast<double>(out.evaluated);
  return out;
}

}  // namespace epida
