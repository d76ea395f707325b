#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace analog::oracle {

struct Message {
  std::string role;  // system | user | assistant
  std::string content;
  bool operator==(const Message&) const = default;
};

struct Sampling {
  double temperature = 0.0;
  int n = 1;
  int max_tokens = 1024;
  std::vector<std::string> stop;
  bool operator==(const Sampling&) const = default;
};

/// One chat-completion request: ordered messages plus sampling settings.
struct Transcript {
  std::vector<Message> messages;
  Sampling sampling;
  bool operator==(const Transcript&) const = default;

  /// Stable cache key: FNV-1a over the canonical JSON serialization.
  std::string cache_key() const;
};

std::uint64_t fnv1a64(const std::string& data);
std::string fnv1a64_hex(const std::string& data);

}  // namespace analog::oracle
