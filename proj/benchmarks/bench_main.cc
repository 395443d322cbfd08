#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "epida/augment.h"
#include "epida/classifier.h"
#include "epida/infotheory.h"
#include "epida/pipeline.h"
#include "epida/seas.h"
#include "epida/synthetic.h"

namespace epida {
namespace {

ProbVector random_prob(std::mt19937_64& rng, std::size_t classes) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(classes);
  double sum = 0.0;
  for (double& v : p) sum += (v = e(rng) + 1e-6);
  for (double& v : p) v /= sum;
  return ProbVector::from(std::move(p));
}

void BM_ScorePair(benchmark::State& state) {
  const auto classes = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const auto z = random_prob(rng, classes), zt = random_prob(rng, classes);
  const OneHotLabel y(0, classes);
  for (auto _ : state) benchmark::DoNotOptimize(score_pair(z, zt, y));
}
BENCHMARK(BM_ScorePair)->Arg(2)->Arg(10)->Arg(50);

void BM_SelectTopM(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<Candidate> pool(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    pool[i].s_tot = u(rng);
    pool[i].pool_index = i;
  }
  for (auto _ : state) benchmark::DoNotOptimize(select_top_m(pool, 3));
}
BENCHMARK(BM_SelectTopM)->Arg(9)->Arg(30);

void BM_GenerateCandidates(benchmark::State& state) {
  const auto text = TokenizedText::from_string("i am so happy and excited about this wonderful day at the beach");
  EdaConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_candidates(text, 9, cfg));
    ++cfg.seed;
  }
}
BENCHMARK(BM_GenerateCandidates);

void BM_Featurize(benchmark::State& state) {
  const auto text = TokenizedText::from_string("i am so happy and excited about this wonderful day at the beach");
  const FeaturizerConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(featurize(text, cfg));
}
BENCHMARK(BM_Featurize);

// Full per-sample path: K*m EDA candidates, builtin scoring, top-m.
void BM_EpidaAugmentDataset(benchmark::State& state) {
  const KeywordTask task;
  const Dataset data = task.generate(500, 3);
  Model model(FeaturizerConfig{}, data.labels);
  std::vector<Example> examples;
  for (const auto& s : preprocess_dataset(data)) {
    examples.push_back({featurize(s.text, model.featurizer()), s.label});
  }
  OptimizerState opt = OptimizerState::for_model(model);
  pretrain(model, opt, examples, TrainConfig{}, 2);
  const ModelScorer scorer(std::make_shared<const Model>(std::move(model)));
  const EdaAugmenter augmenter(EdaConfig{}, std::make_shared<const SynonymLexicon>(task.lexicon()),
                               std::make_shared<const StopwordList>(StopwordList::builtin()));
  AugmentJob job;
  job.threads = static_cast<std::size_t>(state.range(0));
  std::size_t selected = 0;
  for (auto _ : state) {
    const auto r = augment_dataset(data, scorer, augmenter, job);
    selected += r.selected.size();
    ++job.seed;
  }
  state.counters["samples/s"] =
      benchmark::Counter(static_cast<double>(selected), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_EpidaAugmentDataset)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
}  // namespace epida

BENCHMARK_MAIN();
