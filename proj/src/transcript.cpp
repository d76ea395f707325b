#include "analog/transcript.hpp"

#include <nlohmann/json.hpp>

namespace analog::oracle {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& data) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return std::string(buf);
}

std::string Transcript::cache_key() const {
  json j;
  j["messages"] = json::array();
  for (const auto& m : messages) j["messages"].push_back({{"role", m.role}, {"content", m.content}});
  j["sampling"] = {{"temperature", sampling.temperature},
                   {"n", sampling.n},
                   {"max_tokens", sampling.max_tokens},
                   {"stop", sampling.stop}};
  return fnv1a64_hex(j.dump());
}

}  // namespace analog::oracle
