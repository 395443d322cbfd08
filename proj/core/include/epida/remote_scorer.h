#pragma once

// HTTP client for an external classifier.
//
// Request:  POST <endpoint>/probs  {"texts": ["...", ...]}
// Response: {"probs": [[p_0, ..., p_{C-1}], ...]}  one row per text, in order.

#include <chrono>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "epida/infotheory.h"
#include "epida/seas.h"

namespace epida {

struct RemoteScorerOptions {
  std::chrono::milliseconds timeout{30'000};
  std::size_t batch_size = 64;
  std::size_t max_attempts = 3;
  std::chrono::milliseconds backoff_base{500};  // doubled after each failed attempt
  // Expected row length; 0 accepts any C >= 2 as long as rows agree.
  std::size_t classes = 0;
  // Replaceable for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

class RemoteScorer final : public ProbabilityScorer {
 public:
  // `endpoint` is a base URL such as "http://127.0.0.1:8080" or
  // "http://host:8080/api"; requests go to its "/probs" path.
  RemoteScorer(std::string endpoint, RemoteScorerOptions options = {});

  std::size_t classes() const override;
  std::vector<ProbVector> predict(std::span<const TokenizedText> texts) const override;

  // Texts are sent verbatim.
  std::vector<ProbVector> score_texts(std::span<const std::string> texts) const;

 private:
  std::vector<ProbVector> post_batch(std::span<const std::string> texts, std::size_t offset) const;

  std::string host_;
  std::string path_;
  RemoteScorerOptions options_;
};

// Convenience wrapper around RemoteScorer::score_texts.
std::vector<ProbVector> remote_score(const std::string& endpoint,
                                     std::span<const std::string> texts,
                                     const RemoteScorerOptions& options = {});

}  // namespace epida
