#pragma once

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "analog/transcript.hpp"

namespace analog::oracle {

struct OracleUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ReplayMiss : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One chat-completion provider. Implementations must tolerate concurrent
/// callers.
class Backend {
 public:
  virtual ~Backend() = default;
  /// Returns exactly transcript.sampling.n completion texts.
  virtual std::vector<std::string> complete(const Transcript& transcript) = 0;
  virtual std::string id() const = 0;
};

/// A rule-driven backend for tests and shipped fixtures. Rules match when
/// every `contains` fragment appears in the concatenated message contents;
/// the first matching rule wins. The rule's completions are cycled to
/// satisfy the requested n.
class ScriptedBackend : public Backend {
 public:
  struct Rule {
    std::vector<std::string> contains;
    std::vector<std::string> completions;
  };

  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<Rule> rules) : rules_(std::move(rules)) {}

  void add_rule(Rule rule) { rules_.push_back(std::move(rule)); }

  static ScriptedBackend from_json_file(const std::string& path);

  std::vector<std::string> complete(const Transcript& transcript) override;
  std::string id() const override { return "scripted"; }

 private:
  std::vector<Rule> rules_;
};

/// Backend driven by a callable; handy for in-test instrumentation.
class LambdaBackend : public Backend {
 public:
  using Fn = std::function<std::vector<std::string>(const Transcript&)>;
  explicit LambdaBackend(Fn fn) : fn_(std::move(fn)) {}
  std::vector<std::string> complete(const Transcript& t) override { return fn_(t); }
  std::string id() const override { return "lambda"; }

 private:
  Fn fn_;
};

/// Strict replay from an append-only JSONL cache. A transcript not present
/// in the cache raises ReplayMiss.
class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(const std::string& cache_path);
  std::vector<std::string> complete(const Transcript& transcript) override;
  std::string id() const override { return "replay"; }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

/// Wraps another backend with an append-only JSONL cache. Identical
/// transcripts return the cached completions byte-identically.
class CachingBackend : public Backend {
 public:
  CachingBackend(std::shared_ptr<Backend> inner, std::string cache_path);
  std::vector<std::string> complete(const Transcript& transcript) override;
  std::string id() const override { return "cache(" + inner_->id() + ")"; }

 private:
  std::shared_ptr<Backend> inner_;
  std::string cache_path_;
  std::mutex mu_;
  std::map<std::string, std::vector<std::string>> entries_;
};

/// Live chat-completion endpoint speaking the {model, messages, temperature,
/// n, max_tokens} wire contract. Endpoint and credential come from
/// ANALOG_ENDPOINT / ANALOG_API_KEY when not given explicitly.
class HttpBackend : public Backend {
 public:
  HttpBackend(std::string base_url, std::string api_key, std::string model);
  static std::unique_ptr<HttpBackend> from_env(const std::string& model);
  std::vector<std::string> complete(const Transcript& transcript) override;
  std::string id() const override { return "http"; }

 private:
  std::string base_url_;
  std::string api_key_;
  std::string model_;
};

/// Shared front door: bounded in-flight concurrency plus retry on
/// transient transport failures.
class Client {
 public:
  explicit Client(std::shared_ptr<Backend> backend, int max_in_flight = 8, int max_retries = 2);

  std::vector<std::string> complete(const Transcript& transcript);
  /// Single deterministic completion (n forced to 1).
  std::string complete_one(Transcript transcript);

  Backend& backend() { return *backend_; }

 private:
  std::shared_ptr<Backend> backend_;
  int max_retries_;
  // hand-rolled semaphore: std::counting_semaphore fixes the ceiling at compile time
  std::mutex mu_;
  std::condition_variable cv_;
  int available_;
};

}  // namespace analog::oracle
