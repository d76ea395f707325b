#include "analog/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace analog::oracle {

using nlohmann::json;

namespace {

std::string joined_contents(const Transcript& t) {
  std::string out;
  for (const auto& m : t.messages) {
    out += m.content;
    out += '\n';
  }
  return out;
}

json transcript_to_json(const Transcript& t) {
  json messages = json::array();
  for (const auto& m : t.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  return {{"messages", messages},
          {"sampling",
           {{"temperature", t.sampling.temperature},
            {"n", t.sampling.n},
            {"max_tokens", t.sampling.max_tokens},
            {"stop", t.sampling.stop}}}};
}

std::vector<std::string> take_n(const std::vector<std::string>& pool, int n) {
  std::vector<std::string> out;
  if (pool.empty()) return out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(pool[static_cast<std::size_t>(i) % pool.size()]);
  return out;
}

}  // namespace

// ---- ScriptedBackend ----

std::vector<std::string> ScriptedBackend::complete(const Transcript& transcript) {
  const std::string haystack = joined_contents(transcript);
  for (const auto& rule : rules_) {
    bool ok = true;
    for (const auto& frag : rule.contains) {
      if (haystack.find(frag) == std::string::npos) {
        ok = false;
        break;
      }
    }
    if (ok) return take_n(rule.completions, transcript.sampling.n);
  }
  throw OracleUnavailable("scripted backend: no rule matches transcript");
}

ScriptedBackend ScriptedBackend::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open script file: " + path);
  json j = json::parse(in);
  std::vector<Rule> rules;
  for (const auto& item : j.at("rules")) {
    Rule r;
    for (const auto& frag : item.at("contains")) r.contains.push_back(frag.get<std::string>());
    for (const auto& c : item.at("completions")) r.completions.push_back(c.get<std::string>());
    rules.push_back(std::move(r));
  }
  return ScriptedBackend(std::move(rules));
}

// ---- ReplayBackend ----

ReplayBackend::ReplayBackend(const std::string& cache_path) {
  std::ifstream in(cache_path);
  if (!in) throw std::runtime_error("cannot open replay cache: " + cache_path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    std::vector<std::string> completions;
    for (const auto& c : j.at("completions")) completions.push_back(c.get<std::string>());
    entries_[j.at("key").get<std::string>()] = std::move(completions);
  }
}

std::vector<std::string> ReplayBackend::complete(const Transcript& transcript) {
  auto it = entries_.find(transcript.cache_key());
  if (it == entries_.end())
    throw ReplayMiss("replay cache has no entry for key " + transcript.cache_key());
  return it->second;
}

// ---- CachingBackend ----

CachingBackend::CachingBackend(std::shared_ptr<Backend> inner, std::string cache_path)
    : inner_(std::move(inner)), cache_path_(std::move(cache_path)) {
  std::ifstream in(cache_path_);
  std::string line;
  while (in && std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    std::vector<std::string> completions;
    for (const auto& c : j.at("completions")) completions.push_back(c.get<std::string>());
    entries_[j.at("key").get<std::string>()] = std::move(completions);
  }
}

std::vector<std::string> CachingBackend::complete(const Transcript& transcript) {
  const std::string key = transcript.cache_key();
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  auto completions = inner_->complete(transcript);
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = entries_.emplace(key, completions);
  if (inserted) {
    json record = {{"key", key},
                   {"transcript", transcript_to_json(transcript)},
                   {"completions", completions}};
    std::ofstream out(cache_path_, std::ios::app);
    out << record.dump() << "\n";
  }
  return it->second;
}

// ---- HttpBackend ----

HttpBackend::HttpBackend(std::string base_url, std::string api_key, std::string model)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), model_(std::move(model)) {}

std::unique_ptr<HttpBackend> HttpBackend::from_env(const std::string& model) {
  const char* endpoint = std::getenv("ANALOG_ENDPOINT");
  if (!endpoint) throw OracleUnavailable("ANALOG_ENDPOINT is not set");
  const char* key = std::getenv("ANALOG_API_KEY");
  return std::make_unique<HttpBackend>(endpoint, key ? key : "", model);
}

std::vector<std::string> HttpBackend::complete(const Transcript& transcript) {
  json body;
  body["model"] = model_;
  body["messages"] = json::array();
  for (const auto& m : transcript.messages)
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  body["temperature"] = transcript.sampling.temperature;
  body["n"] = transcript.sampling.n;
  body["max_tokens"] = transcript.sampling.max_tokens;
  if (!transcript.sampling.stop.empty()) body["stop"] = transcript.sampling.stop;

  httplib::Client client(base_url_);
  client.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
  if (!res) throw TransportError("no response from " + base_url_);
  if (res->status >= 500) throw TransportError("server error " + std::to_string(res->status));
  if (res->status != 200)
    throw OracleUnavailable("endpoint returned status " + std::to_string(res->status));
  json reply = json::parse(res->body);
  std::vector<std::string> out;
  for (const auto& choice : reply.at("choices"))
    out.push_back(choice.at("message").at("content").get<std::string>());
  if (static_cast<int>(out.size()) < transcript.sampling.n)
    throw TransportError("endpoint returned fewer choices than requested");
  out.resize(static_cast<std::size_t>(transcript.sampling.n));
  return out;
}

// ---- Client ----

Client::Client(std::shared_ptr<Backend> backend, int max_in_flight, int max_retries)
    : backend_(std::move(backend)),
      max_retries_(max_retries),
      available_(max_in_flight > 0 ? max_in_flight : 1) {}

std::vector<std::string> Client::complete(const Transcript& transcript) {
  {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
  }
  struct Release {
    Client* c;
    ~Release() {
      std::lock_guard<std::mutex> lock(c->mu_);
      ++c->available_;
      c->cv_.notify_one();
    }
  } release{this};

  for (int attempt = 0;; ++attempt) {
    try {
      return backend_->complete(transcript);
    } catch (const TransportError&) {
      if (attempt >= max_retries_) throw OracleUnavailable("backend exhausted after retries");
      std::this_thread::sleep_for(std::chrono::milliseconds(50 * (attempt + 1)));
    }
  }
}

std::string Client::complete_one(Transcript transcript) {
  transcript.sampling.n = 1;
  auto out = complete(transcript);
  if (out.empty()) throw OracleUnavailable("backend returned no completions");
  return out.front();
}

}  // namespace analog::oracle
