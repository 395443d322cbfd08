#pragma once

// Softmax-linear text classifier over hashed bag-of-n-gram features.
//
// Losses:
//   loss_original  = 1/n sum_i CE(p(x_i), y_i)
//   loss_generated = 1/n sum_i 1/m sum_j CE(p(t_ij), y_i)
//   loss_total     = loss_original + loss_generated
// CE uses the same epsilon clamp as the scoring code.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "epida/infotheory.h"
#include "epida/text.h"

namespace epida {

struct FeaturizerConfig {
  std::uint64_t dim = std::uint64_t{1} << 18;  // power of two
  std::vector<int> orders{1, 2};
  std::uint64_t hash_seed = 0x9E3779B9;

  void validate() const;
  friend bool operator==(const FeaturizerConfig&, const FeaturizerConfig&) = default;
};

// Sparse vector with strictly increasing indices.
struct FeatureVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return indices.size(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Hashed n-gram counts scaled by 1/sqrt(nnz). Throws DomainError on empty text.
FeatureVector featurize(const TokenizedText& text, const FeaturizerConfig& cfg);

// Euclidean distance between the L2-normalized versions of a and b.
double normalized_distance(const FeatureVector& a, const FeatureVector& b);

class Model {
 public:
  Model(FeaturizerConfig featurizer, std::vector<std::string> labels);

  std::size_t classes() const noexcept { return labels_.size(); }
  std::uint64_t dim() const noexcept { return featurizer_.dim; }
  const FeaturizerConfig& featurizer() const noexcept { return featurizer_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  // Row-major dim x classes.
  std::span<double> weights() noexcept { return weights_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<double> bias() noexcept { return bias_; }
  std::span<const double> bias() const noexcept { return bias_; }

  double weight(std::size_t feature, std::size_t cls) const {
    return weights_[feature * classes() + cls];
  }

  bool all_finite() const;

 private:
  FeaturizerConfig featurizer_;
  std::vector<std::string> labels_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

// Bitwise equality of config, labels, weights and bias.
bool bit_identical(const Model& a, const Model& b);

std::vector<double> logits(const Model& model, const FeatureVector& features);
ProbVector predict_proba(const Model& model, const FeatureVector& features);
ProbVector predict_proba(const Model& model, const TokenizedText& text);
std::size_t predict_label(const Model& model, const FeatureVector& features);

struct Example {
  FeatureVector features;
  std::size_t label = 0;
};

// The m selected candidates of one source sample; they inherit its label.
struct AugmentedGroup {
  std::size_t label = 0;
  std::vector<FeatureVector> candidates;
};

double cross_entropy(const ProbVector& p, std::size_t label, double eps = kDefaultClampEps);

double loss_original(const Model& model, std::span<const Example> samples,
                     double eps = kDefaultClampEps);
// Throws DomainError on an empty set or ragged groups.
double loss_generated(const Model& model, std::span<const AugmentedGroup> groups,
                      double eps = kDefaultClampEps);
double loss_total(const Model& model, std::span<const Example> samples,
                  std::span<const AugmentedGroup> groups, double eps = kDefaultClampEps);

struct Gradient {
  std::vector<double> weights;
  std::vector<double> bias;
};

// Without groups the objective is loss_original; with groups it is
// loss_total and groups.size() must equal originals.size().
struct Batch {
  std::vector<Example> originals;
  std::vector<AugmentedGroup> groups;
};

struct LossReport {
  double original = 0.0;
  double generated = 0.0;
  double total = 0.0;
};

// Objective value and its analytic gradient at `model`.
LossReport loss_and_gradient(const Model& model, const Batch& batch, Gradient& grad,
                             double eps = kDefaultClampEps);

struct TrainConfig {
  double learning_rate = 1e-2;
  double weight_decay = 1e-4;  // decoupled, applied to weights only
  std::size_t batch_size = 32;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double clamp_eps = kDefaultClampEps;

  void validate() const;
};

// First/second moment estimates for AdamW.
struct OptimizerState {
  std::vector<double> m_weights, v_weights, m_bias, v_bias;
  std::uint64_t step = 0;

  static OptimizerState for_model(const Model& model);
};

// One AdamW update with the given gradient. Throws TrainingError on
// non-finite gradients or parameters.
void apply_adamw(Model& model, OptimizerState& state, const Gradient& grad,
                 const TrainConfig& cfg);

LossReport train_step(Model& model, OptimizerState& state, const Batch& batch,
                      const TrainConfig& cfg);

// `epochs` passes of shuffled mini-batches over loss_original. Deterministic
// for a fixed cfg.seed.
Model pretrain(Model model, std::span<const Example> dataset, const TrainConfig& cfg,
               std::size_t epochs);
void pretrain(Model& model, OptimizerState& state, std::span<const Example> dataset,
              const TrainConfig& cfg, std::size_t epochs);

// Binary checkpoint: featurizer config, label vocabulary, weights, bias.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace epida
