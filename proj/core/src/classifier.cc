#include "epida/classifier.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <utility>

#include "epida/errors.h"

namespace epida {
namespace {

constexpr char kCheckpointMagic[8] = {'E', 'P', 'I', 'D', 'A', 'M', 'D', 'L'};
constexpr std::uint32_t kCheckpointVersion = 1;

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a over the n-gram's bytes, seeded and finalized with splitmix64.
std::uint64_t hash_ngram(std::span<const std::string> gram, std::uint64_t seed) {
  std::uint64_t h = 0xCBF29CE484222325ULL ^ mix64(seed);
  auto feed = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001B3ULL;
  };
  feed(static_cast<unsigned char>(gram.size()));
  for (const auto& tok : gram) {
    for (char ch : tok) feed(static_cast<unsigned char>(ch));
    feed(0x1F);
  }
  return mix64(h);
}

void softmax_inplace(std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

// Accumulates weight * dCE/dlogits for one example into grad. Returns CE.
double accumulate_example(const Model& model, const FeatureVector& x, std::size_t label,
                          double weight, double eps, Gradient& grad) {
  const std::size_t c = model.classes();
  std::vector<double> p = logits(model, x);
  softmax_inplace(p);
  const double py = p[label];
  const double ce = -std::log(std::max(py, eps));
  // Inside the clamp region the loss is flat.
  if (py < eps) return ce;
  p[label] -= 1.0;
  for (std::size_t k = 0; k < c; ++k) grad.bias[k] += weight * p[k];
  for (std::size_t f = 0; f < x.nnz(); ++f) {
    double* row = grad.weights.data() + static_cast<std::size_t>(x.indices[f]) * c;
    const double scale = weight * x.values[f];
    for (std::size_t k = 0; k < c; ++k) row[k] += scale * p[k];
  }
  return ce;
}

void check_label(const Model& model, std::size_t label) {
  if (label >= model.classes()) {
    throw DomainError("label " + std::to_string(label) + " outside the model's " +
                      std::to_string(model.classes()) + " classes");
  }
}

void check_groups(std::span<const AugmentedGroup> groups) {
  if (groups.empty()) throw DomainError("augmented set is empty");
  const std::size_t m = groups.front().candidates.size();
  if (m == 0) throw DomainError("augmented group has no candidates");
  for (const auto& g : groups) {
    if (g.candidates.size() != m) {
      throw DomainError("ragged augmented groups: expected " + std::to_string(m) +
                        " candidates per source, found " + std::to_string(g.candidates.size()));
    }
  }
}

template <typename T>
void write_pod(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::string& source) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw IoError(source + ": truncated model checkpoint");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void FeaturizerConfig::validate() const {
  if (dim == 0 || !std::has_single_bit(dim) || dim > (std::uint64_t{1} << 32)) {
    throw ConfigError("feature dimension must be a power of two no larger than 2^32");
  }
  if (orders.empty()) throw ConfigError("at least one n-gram order is required");
  for (int n : orders) {
    if (n < 1 || n > 8) throw ConfigError("n-gram orders must lie in [1, 8]");
  }
}

FeatureVector featurize(const TokenizedText& text, const FeaturizerConfig& cfg) {
  if (text.empty()) throw DomainError("cannot featurize an empty text");
  std::vector<std::uint32_t> hits;
  const std::span<const std::string> toks(text.tokens);
  for (int order : cfg.orders) {
    const auto n = static_cast<std::size_t>(order);
    if (toks.size() < n) continue;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      hits.push_back(static_cast<std::uint32_t>(hash_ngram(toks.subspan(i, n), cfg.hash_seed) &
                                                (cfg.dim - 1)));
    }
  }
  std::sort(hits.begin(), hits.end());
  FeatureVector fv;
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    fv.indices.push_back(hits[i]);
    fv.values.push_back(static_cast<double>(j - i));
    i = j;
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(fv.nnz()));
  for (double& v : fv.values) v *= scale;
  return fv;
}

double normalized_distance(const FeatureVector& a, const FeatureVector& b) {
  auto norm = [](const FeatureVector& v) {
    double s = 0.0;
    for (double x : v.values) s += x * x;
    return std::sqrt(s);
  };
  const double na = norm(a);
  const double nb = norm(b);
  double d2 = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.nnz() || j < b.nnz()) {
    double va = 0.0, vb = 0.0;
    if (j >= b.nnz() || (i < a.nnz() && a.indices[i] < b.indices[j])) {
      va = a.values[i++] / na;
    } else if (i >= a.nnz() || b.indices[j] < a.indices[i]) {
      vb = b.values[j++] / nb;
    } else {
      va = a.values[i++] / na;
      vb = b.values[j++] / nb;
    }
    d2 += (va - vb) * (va - vb);
  }
  return std::sqrt(d2);
}

Model::Model(FeaturizerConfig featurizer, std::vector<std::string> labels)
    : featurizer_(std::move(featurizer)), labels_(std::move(labels)) {
  featurizer_.validate();
  if (labels_.size() < 2) throw DomainError("a classifier needs at least two classes");
  weights_.assign(featurizer_.dim * labels_.size(), 0.0);
  bias_.assign(labels_.size(), 0.0);
}

bool Model::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(weights_.begin(), weights_.end(), finite) &&
         std::all_of(bias_.begin(), bias_.end(), finite);
}

bool bit_identical(const Model& a, const Model& b) {
  auto same_bits = [](std::span<const double> x, std::span<const double> y) {
    return x.size() == y.size() &&
           (x.empty() || std::memcmp(x.data(), y.data(), x.size_bytes()) == 0);
  };
  return a.featurizer() == b.featurizer() && a.labels() == b.labels() &&
         same_bits(a.weights(), b.weights()) && same_bits(a.bias(), b.bias());
}

std::vector<double> logits(const Model& model, const FeatureVector& features) {
  const std::size_t c = model.classes();
  std::vector<double> z(model.bias().begin(), model.bias().end());
  const auto w = model.weights();
  for (std::size_t f = 0; f < features.nnz(); ++f) {
    if (features.indices[f] >= model.dim()) {
      throw DomainError("feature index " + std::to_string(features.indices[f]) +
                        " exceeds model dimension " + std::to_string(model.dim()));
    }
    const double* row = w.data() + static_cast<std::size_t>(features.indices[f]) * c;
    for (std::size_t k = 0; k < c; ++k) z[k] += features.values[f] * row[k];
  }
  return z;
}

ProbVector predict_proba(const Model& model, const FeatureVector& features) {
  std::vector<double> z = logits(model, features);
  softmax_inplace(z);
  return ProbVector::from(std::move(z));
}

ProbVector predict_proba(const Model& model, const TokenizedText& text) {
  return predict_proba(model, featurize(text, model.featurizer()));
}

std::size_t predict_label(const Model& model, const FeatureVector& features) {
  const auto z = logits(model, features);
  return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
}

double cross_entropy(const ProbVector& p, std::size_t label, double eps) {
  if (label >= p.size()) throw DomainError("label outside the distribution's support");
  return -std::log(std::max(p[label], eps));
}

double loss_original(const Model& model, std::span<const Example> samples, double eps) {
  if (samples.empty()) throw DomainError("loss over an empty sample set");
  double sum = 0.0;
  for (const auto& s : samples) {
    check_label(model, s.label);
    sum += cross_entropy(predict_proba(model, s.features), s.label, eps);
  }
  return sum / static_cast<double>(samples.size());
}

double loss_generated(const Model& model, std::span<const AugmentedGroup> groups, double eps) {
  check_groups(groups);
  double outer = 0.0;
  for (const auto& g : groups) {
    check_label(model, g.label);
    double inner = 0.0;
    for (const auto& t : g.candidates) inner += cross_entropy(predict_proba(model, t), g.label, eps);
    outer += inner / static_cast<double>(g.candidates.size());
  }
  return outer / static_cast<double>(groups.size());
}

double loss_total(const Model& model, std::span<const Example> samples,
                  std::span<const AugmentedGroup> groups, double eps) {
  return loss_original(model, samples, eps) + loss_generated(model, groups, eps);
}

LossReport loss_and_gradient(const Model& model, const Batch& batch, Gradient& grad, double eps) {
  if (batch.originals.empty()) throw DomainError("empty training batch");
  const bool with_generated = !batch.groups.empty();
  if (with_generated) {
    check_groups(batch.groups);
    if (batch.groups.size() != batch.originals.size()) {
      throw DomainError("batch has " + std::to_string(batch.originals.size()) +
                        " originals but " + std::to_string(batch.groups.size()) + " groups");
    }
  }
  grad.weights.assign(model.weights().size(), 0.0);
  grad.bias.assign(model.classes(), 0.0);

  const double n = static_cast<double>(batch.originals.size());
  LossReport report;
  for (const auto& ex : batch.originals) {
    check_label(model, ex.label);
    report.original += accumulate_example(model, ex.features, ex.label, 1.0 / n, eps, grad);
  }
  report.original /= n;
  if (with_generated) {
    const double m = static_cast<double>(batch.groups.front().candidates.size());
    for (const auto& g : batch.groups) {
      check_label(model, g.label);
      for (const auto& t : g.candidates) {
        report.generated += accumulate_example(model, t, g.label, 1.0 / (n * m), eps, grad);
      }
    }
    report.generated /= n * m;
  }
  report.total = report.original + report.generated;
  return report;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be finite and nonnegative");
  }
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be nonnegative");
  if (batch_size == 0) throw ConfigError("batch size must be at least 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0,1)");
  }
  if (!(adam_eps > 0.0) || !(clamp_eps > 0.0)) throw ConfigError("epsilons must be positive");
}

OptimizerState OptimizerState::for_model(const Model& model) {
  OptimizerState s;
  s.m_weights.assign(model.weights().size(), 0.0);
  s.v_weights.assign(model.weights().size(), 0.0);
  s.m_bias.assign(model.classes(), 0.0);
  s.v_bias.assign(model.classes(), 0.0);
  return s;
}

void apply_adamw(Model& model, OptimizerState& state, const Gradient& grad,
                 const TrainConfig& cfg) {
  auto weights = model.weights();
  auto bias = model.bias();
  if (grad.weights.size() != weights.size() || grad.bias.size() != bias.size()) {
    throw DomainError("gradient shape does not match the model");
  }
  if (state.m_weights.size() != weights.size()) state = OptimizerState::for_model(model);

  for (std::size_t i = 0; i < grad.bias.size(); ++i) {
    if (!std::isfinite(grad.bias[i])) {
      throw TrainingError("non-finite gradient for bias of class " + std::to_string(i) +
                          " at step " + std::to_string(state.step + 1));
    }
  }
  for (std::size_t i = 0; i < grad.weights.size(); ++i) {
    if (!std::isfinite(grad.weights[i])) {
      throw TrainingError("non-finite gradient for weight (" +
                          std::to_string(i / model.classes()) + ", " +
                          std::to_string(i % model.classes()) + ") at step " +
                          std::to_string(state.step + 1));
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  const double lr = cfg.learning_rate;
  const double decay = 1.0 - lr * cfg.weight_decay;

  auto update = [&](std::span<double> params, std::vector<double>& m, std::vector<double>& v,
                    const std::vector<double>& g, double shrink) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double step = (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.adam_eps);
      params[i] = params[i] * shrink - lr * step;
    }
  };
  update(weights, state.m_weights, state.v_weights, grad.weights, decay);
  update(bias, state.m_bias, state.v_bias, grad.bias, 1.0);

  if (!model.all_finite()) {
    throw TrainingError("parameters became non-finite at step " + std::to_string(state.step));
  }
}

LossReport train_step(Model& model, OptimizerState& state, const Batch& batch,
                      const TrainConfig& cfg) {
  cfg.validate();
  Gradient grad;
  LossReport report = loss_and_gradient(model, batch, grad, cfg.clamp_eps);
  apply_adamw(model, state, grad, cfg);
  return report;
}

void pretrain(Model& model, OptimizerState& state, std::span<const Example> dataset,
              const TrainConfig& cfg, std::size_t epochs) {
  cfg.validate();
  if (epochs == 0) return;
  if (dataset.empty()) throw DomainError("cannot pre-train on an empty dataset");
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      Batch batch;
      batch.originals.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) batch.originals.push_back(dataset[order[i]]);
      train_step(model, state, batch, cfg);
    }
  }
}

Model pretrain(Model model, std::span<const Example> dataset, const TrainConfig& cfg,
               std::size_t epochs) {
  OptimizerState state = OptimizerState::for_model(model);
  pretrain(model, state, dataset, cfg, epochs);
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model checkpoint " + path.string());
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_pod<std::uint32_t>(out, kCheckpointVersion);
  const auto& fc = model.featurizer();
  write_pod<std::uint64_t>(out, fc.dim);
  write_pod<std::uint64_t>(out, fc.hash_seed);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(fc.orders.size()));
  for (int n : fc.orders) write_pod<std::int32_t>(out, n);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(model.labels().size()));
  for (const auto& label : model.labels()) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(label.size()));
    out.write(label.data(), static_cast<std::streamsize>(label.size()));
  }
  for (double w : model.weights()) write_pod<double>(out, w);
  for (double b : model.bias()) write_pod<double>(out, b);
  if (!out) throw IoError("failed writing model checkpoint " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  const std::string source = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model checkpoint " + source);
  char magic[sizeof(kCheckpointMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw IoError(source + ": not an epida model checkpoint");
  }
  const auto version = read_pod<std::uint32_t>(in, source);
  if (version != kCheckpointVersion) {
    throw IoError(source + ": unsupported checkpoint version " + std::to_string(version));
  }
  FeaturizerConfig fc;
  fc.dim = read_pod<std::uint64_t>(in, source);
  fc.hash_seed = read_pod<std::uint64_t>(in, source);
  const auto n_orders = read_pod<std::uint32_t>(in, source);
  if (n_orders > 16) throw IoError(source + ": corrupt n-gram order list");
  fc.orders.clear();
  for (std::uint32_t i = 0; i < n_orders; ++i) fc.orders.push_back(read_pod<std::int32_t>(in, source));
  const auto n_labels = read_pod<std::uint32_t>(in, source);
  if (n_labels > (1u << 20)) throw IoError(source + ": corrupt label vocabulary");
  std::vector<std::string> labels;
  for (std::uint32_t i = 0; i < n_labels; ++i) {
    const auto len = read_pod<std::uint32_t>(in, source);
    std::string label(len, '\0');
    if (!in.read(label.data(), len)) throw IoError(source + ": truncated model checkpoint");
    labels.push_back(std::move(label));
  }
  Model model(std::move(fc), std::move(labels));
  for (double& w : model.weights()) w = read_pod<double>(in, source);
  for (double& b : model.bias()) b = read_pod<double>(in, source);
  return model;
}

}  // namespace epida
