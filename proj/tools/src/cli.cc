#include "epida_cli/cli.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "epida/augment.h"
#include "epida/classifier.h"
#include "epida/dataset.h"
#include "epida/errors.h"
#include "epida/export.h"
#include "epida/metrics.h"
#include "epida/pipeline.h"
#include "epida/remote_scorer.h"
#include "epida/synthetic.h"
#include "epida/training.h"
#include "json.hpp"

namespace epida::cli {
namespace {

using nlohmann::ordered_json;

constexpr const char* kSubcommands[] = {"augment", "train", "eval", "score"};

struct SeasFlags {
  std::size_t m = 3;
  std::size_t k = 3;
  std::string scheme = "add";
  double alpha = 0.5;
  bool dedup = false;
};

struct AugmentFlags {
  std::string input, output, format;
  SeasFlags seas;
  std::optional<std::uint64_t> seed;
  std::string scorer = "builtin";
  std::string scorer_url;
  std::size_t scorer_batch = 64;
  double scorer_timeout = 30.0;
  std::string lexicon, stopwords, model;
  std::size_t pretrain_epochs = 10;
  std::size_t threads = 1;
  double alpha_eda = 0.1;
  double p_delete = 0.1;
};

struct TrainFlags {
  std::string train, test, format, report, lexicon, stopwords;
  bool synthetic = false;
  std::size_t synthetic_train = 100;
  std::size_t synthetic_test = 1000;
  SeasFlags seas;
  std::size_t pretrain_epochs = 10;
  std::size_t oa_epochs = 10;
  double data_fraction = 1.0;
  std::optional<std::string> seeds;
  bool offline = false;
  std::string selection = "epida";
  std::string loss = "total";
  double learning_rate = 1e-2;
  std::size_t batch_size = 32;
};

struct EvalFlags {
  std::string pred, gold, format;
};

struct ScoreFlags {
  std::string original, candidate, label, model, scorer_url;
  std::string labels = "0,1";
  std::string scheme = "add";
  double alpha = 0.5;
};

void add_seas_flags(CLI::App* sub, SeasFlags& f) {
  sub->add_option("--m", f.m, "Selected candidates per sample")->check(CLI::PositiveNumber);
  sub->add_option("--k", f.k, "Pool amplification factor")->check(CLI::PositiveNumber);
  sub->add_option("--scheme", f.scheme, "Score combination: add, mul or weighted")
      ->check(CLI::IsMember({"add", "mul", "weighted"}));
  sub->add_option("--alpha", f.alpha, "Diversity weight for --scheme weighted");
  sub->add_flag("--dedup", f.dedup, "Skip repeated candidate texts during selection");
}

CombineScheme make_scheme(const std::string& name, double alpha) {
  if (name == "mul") return CombineScheme::multiply();
  if (name == "weighted") return CombineScheme::weighted(alpha);
  return CombineScheme::add();
}

SeasConfig make_seas(const SeasFlags& f) {
  SeasConfig cfg;
  cfg.m = f.m;
  cfg.k = f.k;
  cfg.scheme = make_scheme(f.scheme, f.alpha);
  cfg.dedup = f.dedup;
  cfg.validate();
  return cfg;
}

std::uint64_t parse_seed(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw ConfigError(what + " is not a non-negative integer: '" + text + "'");
  }
  return value;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("EPIDA_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  return parse_seed(raw, "EPIDA_SEED");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(parse_seed(item, "seed"));
  }
  if (out.empty()) throw ConfigError("empty seed list");
  return out;
}

std::vector<std::string> split_labels(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

DatasetFormat format_for(const std::string& flag, const std::string& path) {
  return flag.empty() ? format_from_extension(path) : parse_dataset_format(flag);
}

template <class T>
std::shared_ptr<const T> borrow(const T& value) {
  return std::shared_ptr<const T>(&value, [](const T*) {});
}

std::shared_ptr<const StopwordList> load_stopwords(const std::string& path) {
  if (path.empty()) return borrow(StopwordList::builtin());
  return std::make_shared<const StopwordList>(StopwordList::load(path));
}

std::shared_ptr<const SynonymLexicon> load_lexicon(const std::string& path) {
  if (path.empty()) return borrow(SynonymLexicon::builtin());
  return std::make_shared<const SynonymLexicon>(SynonymLexicon::load(path));
}

int run_augment(const AugmentFlags& f, std::ostream& out, std::ostream& err) {
  const SeasConfig seas = make_seas(f.seas);
  const std::uint64_t seed = f.seed ? *f.seed : env_seed().value_or(0);
  const auto stopwords = load_stopwords(f.stopwords);
  const auto lexicon = load_lexicon(f.lexicon);
  EdaConfig eda;
  eda.alpha_eda = f.alpha_eda;
  eda.p_delete = f.p_delete;
  const EdaAugmenter augmenter(eda, lexicon, stopwords);

  std::optional<Model> model;
  if (!f.model.empty()) model = load_model(f.model);
  const DatasetFormat format = format_for(f.format, f.input);
  const Dataset data = load_dataset(f.input, format, model ? &model->labels() : nullptr);

  std::unique_ptr<ProbabilityScorer> scorer;
  if (f.scorer == "remote") {
    if (f.scorer_url.empty()) throw ConfigError("--scorer remote needs --scorer-url");
    RemoteScorerOptions opt;
    opt.batch_size = f.scorer_batch;
    opt.classes = data.classes();
    opt.timeout = std::chrono::milliseconds(static_cast<long long>(f.scorer_timeout * 1000.0));
    scorer = std::make_unique<RemoteScorer>(f.scorer_url, opt);
  } else {
    if (!model) {
      model.emplace(FeaturizerConfig{}, data.labels);
      std::vector<Example> examples;
      for (const auto& s : preprocess_dataset(data, *stopwords)) {
        examples.push_back(Example{featurize(s.text, model->featurizer()), s.label});
      }
      TrainConfig tc;
      tc.seed = seed;
      OptimizerState state = OptimizerState::for_model(*model);
      pretrain(*model, state, examples, tc, f.pretrain_epochs);
    }
    scorer = std::make_unique<ModelScorer>(std::make_shared<const Model>(std::move(*model)));
  }

  AugmentJob job;
  job.seas = seas;
  job.seed = seed;
  job.threads = f.threads;
  const AugmentResult result = augment_dataset(data, *scorer, augmenter, job, *stopwords);
  export_augmented(result.selected, data.labels, std::filesystem::path(f.output));
  out << "wrote " << result.selected.size() << " rows to " << f.output << "\n";
  err << "augment: " << result.selected.size() << " samples in " << result.seconds << " s ("
      << result.samples_per_second << " samples/s)\n";
  return kExitOk;
}

SelectionMode parse_selection(const std::string& s) {
  if (s == "random") return SelectionMode::kRandom;
  if (s == "none") return SelectionMode::kNone;
  return SelectionMode::kEpida;
}

LossMode parse_loss(const std::string& s) {
  if (s == "original") return LossMode::kOriginal;
  if (s == "generated") return LossMode::kGenerated;
  return LossMode::kTotal;
}

int run_train(const TrainFlags& f, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.seas = make_seas(f.seas);
  cfg.pretrain_epochs = f.pretrain_epochs;
  cfg.oa_epochs = f.oa_epochs;
  cfg.data_fraction = f.data_fraction;
  cfg.online = !f.offline;
  cfg.selection = parse_selection(f.selection);
  cfg.loss = parse_loss(f.loss);
  cfg.train.learning_rate = f.learning_rate;
  cfg.train.batch_size = f.batch_size;
  if (f.seeds) {
    cfg.seeds = parse_seed_list(*f.seeds);
  } else if (const auto s = env_seed()) {
    cfg.seeds = {*s};
  }
  cfg.validate();

  const auto stopwords = load_stopwords(f.stopwords);
  Dataset train, test;
  std::optional<KeywordTask> task;
  LabelingOracle oracle;
  std::shared_ptr<const SynonymLexicon> lexicon;
  if (f.synthetic) {
    if (!f.train.empty() || !f.test.empty()) {
      throw ConfigError("--synthetic replaces --train/--test");
    }
    task.emplace();
    train = task->generate(f.synthetic_train, 1000);
    test = task->generate(f.synthetic_test, 2000);
    oracle = task->oracle();
    lexicon = f.lexicon.empty() ? borrow(task->lexicon()) : load_lexicon(f.lexicon);
  } else {
    if (f.train.empty() || f.test.empty()) {
      throw ConfigError("train needs --train and --test, or --synthetic");
    }
    train = load_dataset(f.train, format_for(f.format, f.train));
    test = load_dataset(f.test, format_for(f.format, f.test), &train.labels);
    lexicon = load_lexicon(f.lexicon);
  }

  const EdaAugmenter augmenter(EdaConfig{}, lexicon, stopwords);
  const TrainingReport report =
      run_training(train, test, cfg, augmenter, oracle ? &oracle : nullptr, *stopwords);
  if (f.report.empty()) {
    out << report.to_json() << "\n";
  } else {
    std::ofstream file(f.report, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write " + f.report);
    file << report.to_json() << "\n";
    if (!file) throw IoError("failed writing " + f.report);
    out << "mean macro-F1 " << report.mean_macro_f1 << "\n";
  }
  if (report.augment_samples_per_second > 0.0) {
    err << "train: augmentation " << report.augment_samples_per_second << " samples/s\n";
  }
  return kExitOk;
}

int run_eval(const EvalFlags& f, std::ostream& out) {
  const Dataset gold = load_dataset(f.gold, format_for(f.format, f.gold));
  const Dataset pred = load_dataset(f.pred, format_for(f.format, f.pred), &gold.labels);
  if (pred.classes() > gold.classes()) {
    throw DomainError("prediction label '" + pred.labels[gold.classes()] +
                      "' does not occur in the gold file");
  }
  if (pred.size() != gold.size()) {
    throw DomainError(std::to_string(pred.size()) + " predictions for " +
                      std::to_string(gold.size()) + " gold labels");
  }
  std::vector<std::size_t> p, g;
  for (const auto& s : pred.samples) p.push_back(s.label);
  for (const auto& s : gold.samples) g.push_back(s.label);
  const MetricsReport r = evaluate_macro_f1(p, g, gold.classes());
  ordered_json j;
  j["samples"] = gold.size();
  j["macro_f1"] = r.macro_f1;
  ordered_json per = ordered_json::object();
  for (std::size_t c = 0; c < gold.classes(); ++c) per[gold.labels[c]] = r.per_class_f1[c];
  j["per_class_f1"] = per;
  if (r.positive_f1) j["positive_f1"] = *r.positive_f1;
  out << j.dump(2) << "\n";
  return kExitOk;
}

int run_score(const ScoreFlags& f, std::ostream& out) {
  SeasConfig cfg;
  cfg.m = 1;
  cfg.k = 2;
  cfg.scheme = make_scheme(f.scheme, f.alpha);

  std::vector<std::string> labels;
  std::unique_ptr<ProbabilityScorer> scorer;
  if (!f.model.empty() && !f.scorer_url.empty()) {
    throw ConfigError("--model and --scorer-url are mutually exclusive");
  }
  if (!f.scorer_url.empty()) {
    labels = split_labels(f.labels);
    RemoteScorerOptions opt;
    opt.classes = labels.size();
    scorer = std::make_unique<RemoteScorer>(f.scorer_url, opt);
  } else {
    auto model = f.model.empty() ? Model(FeaturizerConfig{}, split_labels(f.labels))
                                 : load_model(f.model);
    labels = model.labels();
    scorer = std::make_unique<ModelScorer>(std::make_shared<const Model>(std::move(model)));
  }
  if (labels.size() < 2) throw ConfigError("at least two labels are required");

  const TokenizedText original = preprocess(f.original);
  const std::vector<TokenizedText> pool{original, preprocess(f.candidate)};
  std::size_t label = 0;
  if (f.label.empty()) {
    label = scorer->predict(std::span(&original, 1)).front().argmax();
  } else {
    const auto it = std::find(labels.begin(), labels.end(), f.label);
    if (it == labels.end()) throw ConfigError("unknown label '" + f.label + "'");
    label = static_cast<std::size_t>(it - labels.begin());
  }
  const auto scored = score_candidates(*scorer, Sample{original, label}, 0, pool, cfg);

  ordered_json j;
  j["label"] = labels[label];
  j["pool"] = ordered_json::array();
  const char* roles[] = {"original", "candidate"};
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const Candidate& c = scored[i];
    ordered_json row;
    row["role"] = roles[i];
    row["text"] = c.text.canonical();
    row["s_div_raw"] = c.s_div_raw;
    row["s_qua_raw"] = c.s_qua_raw;
    row["s_div"] = c.s_div;
    row["s_qua"] = c.s_qua;
    row["s_tot"] = c.s_tot;
    j["pool"].push_back(std::move(row));
  }
  out << j.dump(2) << "\n";
  return kExitOk;
}

// Moves "--config FILE" / "--config=FILE" out of args and splices the file's
// arguments in right after the subcommand, so explicit flags (which come
// later) take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;
  auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return std::find(std::begin(kSubcommands), std::end(kSubcommands), a) != std::end(kSubcommands);
  });
  if (sub == args.end()) throw ConfigError("--config must accompany a subcommand");
  const auto extra = config_arguments(*path);
  args.insert(sub + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::vector<std::string> out;
  std::string line;
  std::size_t line_no = 0;
  const auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path, line_no, "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(path, line_no, "empty key");
    out.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feedback-driven text data augmentation"};
  app.name("epida");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  const std::string config_help = "Flat key=value file; command-line flags override it";
  std::string config_path;  // consumed by expand_config; listed for --help

  AugmentFlags af;
  auto* augment = app.add_subcommand("augment", "Select m augmented samples per input sample");
  augment->add_option("input,--input", af.input, "Dataset to augment (tsv or jsonl)")->required();
  augment->add_option("output,--output", af.output, "Destination jsonl file")->required();
  augment->add_option("--format", af.format, "Input format; default from extension")
      ->check(CLI::IsMember({"tsv", "jsonl"}));
  add_seas_flags(augment, af.seas);
  augment->add_option("--seed", af.seed, "Seed; falls back to EPIDA_SEED, then 0");
  augment->add_option("--scorer", af.scorer, "builtin or remote")
      ->check(CLI::IsMember({"builtin", "remote"}));
  augment->add_option("--scorer-url", af.scorer_url, "Base URL of a remote scorer");
  augment->add_option("--scorer-batch", af.scorer_batch, "Texts per remote request")
      ->check(CLI::PositiveNumber);
  augment->add_option("--scorer-timeout", af.scorer_timeout, "Remote request timeout in seconds")
      ->check(CLI::PositiveNumber);
  augment->add_option("--lexicon", af.lexicon, "Synonym lexicon file");
  augment->add_option("--stopwords", af.stopwords, "Stopword file");
  augment->add_option("--model", af.model, "Builtin scorer checkpoint; default trains on input");
  augment->add_option("--pretrain-epochs", af.pretrain_epochs, "Epochs for the builtin scorer");
  augment->add_option("--threads", af.threads, "Worker threads; 0 uses all cores");
  augment->add_option("--alpha-eda", af.alpha_eda, "Fraction of tokens edited by SR/RI/RS");
  augment->add_option("--p-delete", af.p_delete, "Per-token deletion probability");
  augment->add_option("--config", config_path, config_help);

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "Pre-train then train with online augmentation");
  train->add_option("--train", tf.train, "Training split");
  train->add_option("--test", tf.test, "Test split");
  train->add_option("--format", tf.format, "Split format; default from extension")
      ->check(CLI::IsMember({"tsv", "jsonl"}));
  train->add_flag("--synthetic", tf.synthetic, "Use the synthetic keyword task");
  train->add_option("--synthetic-train", tf.synthetic_train, "Synthetic training samples");
  train->add_option("--synthetic-test", tf.synthetic_test, "Synthetic test samples");
  add_seas_flags(train, tf.seas);
  train->add_option("--pretrain-epochs", tf.pretrain_epochs, "Epochs on original data");
  train->add_option("--oa-epochs", tf.oa_epochs, "Online augmentation epochs");
  train->add_option("--data-fraction", tf.data_fraction, "Fraction of the training split");
  train->add_option("--seeds", tf.seeds, "Comma-separated seeds; falls back to EPIDA_SEED");
  train->add_flag("--offline", tf.offline, "Select once and reuse the selection every epoch");
  train->add_option("--selection", tf.selection, "epida, random or none")
      ->check(CLI::IsMember({"epida", "random", "none"}));
  train->add_option("--loss", tf.loss, "total, original or generated")
      ->check(CLI::IsMember({"total", "original", "generated"}));
  train->add_option("--lr", tf.learning_rate, "AdamW learning rate");
  train->add_option("--batch-size", tf.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  train->add_option("--lexicon", tf.lexicon, "Synonym lexicon file");
  train->add_option("--stopwords", tf.stopwords, "Stopword file");
  train->add_option("--report", tf.report, "Write the JSON report here instead of stdout");
  train->add_option("--config", config_path, config_help);

  EvalFlags ef;
  auto* eval = app.add_subcommand("eval", "Macro-F1 of predictions against gold labels");
  eval->add_option("--pred", ef.pred, "Predicted labels (dataset file)")->required();
  eval->add_option("--gold", ef.gold, "Gold labels (dataset file)")->required();
  eval->add_option("--format", ef.format, "File format; default from extension")
      ->check(CLI::IsMember({"tsv", "jsonl"}));
  eval->add_option("--config", config_path, config_help);

  ScoreFlags sf;
  auto* score = app.add_subcommand("score", "Score a candidate against its original");
  score->add_option("--original", sf.original, "Original text")->required();
  score->add_option("--candidate", sf.candidate, "Candidate text")->required();
  score->add_option("--label", sf.label, "Label of the original; default predicted");
  score->add_option("--model", sf.model, "Builtin scorer checkpoint");
  score->add_option("--scorer-url", sf.scorer_url, "Base URL of a remote scorer");
  score->add_option("--labels", sf.labels, "Comma-separated labels without --model");
  score->add_option("--scheme", sf.scheme, "Score combination: add, mul or weighted")
      ->check(CLI::IsMember({"add", "mul", "weighted"}));
  score->add_option("--alpha", sf.alpha, "Diversity weight for --scheme weighted");
  score->add_option("--config", config_path, config_help);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    auto* active = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << active->help();
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "epida: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "epida: " << e.what() << "\n";
    return kExitRuntime;
  }

  try {
    if (augment->parsed()) return run_augment(af, out, err);
    if (train->parsed()) return run_train(tf, out, err);
    if (eval->parsed()) return run_eval(ef, out);
    return run_score(sf, out);
  } catch (const ConfigError& e) {
    err << "epida: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "epida: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace epida::cli
