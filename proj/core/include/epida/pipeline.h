#pragma once

// Dataset-level augmentation: preprocess, generate K*m candidates per
// sample, score and keep m.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "epida/augment.h"
#include "epida/dataset.h"
#include "epida/seas.h"

namespace epida {

struct AugmentJob {
  SeasConfig seas;
  std::uint64_t seed = 0;
  // 0 picks std::thread::hardware_concurrency().
  std::size_t threads = 1;
};

struct AugmentResult {
  // Grouped by source sample in input order, selection rank within a group.
  std::vector<Candidate> selected;
  std::vector<Sample> sources;
  double seconds = 0.0;
  double samples_per_second = 0.0;  // selected candidates per wall-clock second
};

// Sample i is augmented with augmentation_seed(seed, 0, i), so the result
// does not depend on the thread count.
AugmentResult augment_dataset(const Dataset& dataset, const ProbabilityScorer& scorer,
                              const Augmenter& augmenter, const AugmentJob& job,
                              const StopwordList& stopwords = StopwordList::builtin());

std::vector<Sample> preprocess_dataset(const Dataset& dataset,
                                       const StopwordList& stopwords = StopwordList::builtin());

}  // namespace epida
