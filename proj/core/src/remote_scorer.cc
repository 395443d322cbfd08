#include "epida/remote_scorer.h"

#include <algorithm>
#include <thread>

#include "epida/errors.h"
#include "httplib.h"
#include "json.hpp"

namespace epida {
namespace {

using nlohmann::json;

struct SplitUrl {
  std::string host;
  std::string path;
};

SplitUrl split_endpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError("scorer endpoint must start with http://, got '" + endpoint + "'");
  }
  if (endpoint.compare(0, scheme, "http") != 0) {
    throw ConfigError("only plain http scorer endpoints are supported: '" + endpoint + "'");
  }
  const auto slash = endpoint.find('/', scheme + 3);
  SplitUrl out;
  out.host = endpoint.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : endpoint.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  out.path = prefix + "/probs";
  return out;
}

}  // namespace

RemoteScorer::RemoteScorer(std::string endpoint, RemoteScorerOptions options)
    : options_(std::move(options)) {
  auto split = split_endpoint(endpoint);
  host_ = std::move(split.host);
  path_ = std::move(split.path);
  if (options_.batch_size == 0) throw ConfigError("remote scorer batch size must be positive");
  if (options_.max_attempts == 0) throw ConfigError("remote scorer needs at least one attempt");
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::size_t RemoteScorer::classes() const {
  if (options_.classes == 0) {
    throw ConfigError("remote scorer class count is not configured");
  }
  return options_.classes;
}

std::vector<ProbVector> RemoteScorer::predict(std::span<const TokenizedText> texts) const {
  std::vector<std::string> strings;
  strings.reserve(texts.size());
  for (const auto& t : texts) strings.push_back(t.canonical());
  return score_texts(strings);
}

std::vector<ProbVector> RemoteScorer::score_texts(std::span<const std::string> texts) const {
  std::vector<ProbVector> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += options_.batch_size) {
    const std::size_t len = std::min(options_.batch_size, texts.size() - start);
    auto rows = post_batch(texts.subspan(start, len), start);
    std::move(rows.begin(), rows.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<ProbVector> RemoteScorer::post_batch(std::span<const std::string> texts,
                                                 std::size_t offset) const {
  const std::string body =
      json{{"texts", std::vector<std::string>(texts.begin(), texts.end())}}.dump(
          -1, ' ', false, json::error_handler_t::replace);

  httplib::Client client(host_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  std::string failure;
  auto backoff = options_.backoff_base;
  for (std::size_t attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    auto res = client.Post(path_, body, "application/json");
    if (res && res->status >= 200 && res->status < 300) {
      json reply;
      try {
        reply = json::parse(res->body);
      } catch (const json::parse_error& e) {
        throw ProtocolError(std::string("scorer reply is not valid JSON: ") + e.what());
      }
      auto probs = reply.find("probs");
      if (!reply.is_object() || probs == reply.end() || !probs->is_array()) {
        throw ProtocolError("scorer reply lacks a \"probs\" array");
      }
      if (probs->size() != texts.size()) {
        throw ProtocolError("scorer returned " + std::to_string(probs->size()) + " rows for " +
                            std::to_string(texts.size()) + " texts");
      }
      std::vector<ProbVector> rows;
      rows.reserve(texts.size());
      for (std::size_t i = 0; i < probs->size(); ++i) {
        const std::size_t global = offset + i;
        const auto& row = (*probs)[i];
        std::vector<double> values;
        if (!row.is_array()) throw ProtocolError("row " + std::to_string(global) + " is not an array");
        for (const auto& v : row) {
          if (!v.is_number()) {
            throw ProtocolError("row " + std::to_string(global) + " holds a non-numeric entry");
          }
          values.push_back(v.get<double>());
        }
        if (options_.classes != 0 && values.size() != options_.classes) {
          throw ProtocolError("row " + std::to_string(global) + " has " +
                              std::to_string(values.size()) + " classes, expected " +
                              std::to_string(options_.classes));
        }
        if (!rows.empty() && values.size() != rows.front().size()) {
          throw ProtocolError("row " + std::to_string(global) + " disagrees on class count");
        }
        try {
          rows.push_back(ProbVector::from(std::move(values)));
        } catch (const DomainError& e) {
          throw ProtocolError("row " + std::to_string(global) +
                              " is not a valid distribution: " + e.what());
        }
      }
      return rows;
    }
    if (res && res->status < 500) {
      throw ProtocolError("scorer answered HTTP " + std::to_string(res->status));
    }
    failure = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
    if (attempt < options_.max_attempts) {
      options_.sleep(backoff);
      backoff *= 2;
    }
  }
  throw TransportError("scorer at " + host_ + path_ + " unreachable after " +
                       std::to_string(options_.max_attempts) + " attempts: " + failure);
}

std::vector<ProbVector> remote_score(const std::string& endpoint,
                                     std::span<const std::string> texts,
                                     const RemoteScorerOptions& options) {
  return RemoteScorer(endpoint, options).score_texts(texts);
}

}  // namespace epida
