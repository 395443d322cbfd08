#include "epida/pipeline.h"

#include <algorithm>
#include <chrono>
#include <exception>
#include <thread>

#include "epida/errors.h"
#include "epida/training.h"

namespace epida {

std::vector<Sample> preprocess_dataset(const Dataset& dataset, const StopwordList& stopwords) {
  std::vector<Sample> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples) out.push_back(Sample{preprocess(s.text, stopwords), s.label});
  return out;
}

AugmentResult augment_dataset(const Dataset& dataset, const ProbabilityScorer& scorer,
                              const Augmenter& augmenter, const AugmentJob& job,
                              const StopwordList& stopwords) {
  job.seas.validate();
  if (dataset.classes() > scorer.classes()) {
    throw DomainError("dataset has " + std::to_string(dataset.classes()) +
                      " labels but the scorer predicts " + std::to_string(scorer.classes()));
  }
  AugmentResult result;
  result.sources = preprocess_dataset(dataset, stopwords);
  const std::size_t n = result.sources.size();
  std::vector<std::vector<Candidate>> per_sample(n);

  std::size_t threads = job.threads == 0 ? std::thread::hardware_concurrency() : job.threads;
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](std::size_t worker) {
    try {
      for (std::size_t i = worker; i < n; i += threads) {
        per_sample[i] = epida_augment(scorer, result.sources[i], i, augmenter, job.seas,
                                      augmentation_seed(job.seed, 0, i));
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  for (auto& group : per_sample) {
    std::move(group.begin(), group.end(), std::back_inserter(result.selected));
  }
  if (result.seconds > 0.0) {
    result.samples_per_second = static_cast<double>(result.selected.size()) / result.seconds;
  }
  return result;
}

}  // namespace epida
