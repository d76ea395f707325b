#pragma once

#include <optional>
#include <string>

#include "analog/conceptualize.hpp"

#include <nlohmann/json.hpp>

namespace analog {

struct RunConfig {
  conceptualize::SelectionConfig selection;

  struct Simplification {
    int sample_count = 10;
    int quota = 9;
    int max_iters = 5;
  } simplification;

  struct Inference {
    int k = 10;
    bool rag = false;
    std::optional<double> no_repeat_cutoff;
  } inference;

  struct Oracle {
    std::string backend = "scripted";  // scripted | replay | live | cache
    std::string endpoint;
    std::string script_path;
    std::string cache_path;
    int concurrency = 4;
    int max_retries = 2;
  } oracle;

  struct Paths {
    std::string input;
    std::string output;
    std::string journal;
    std::string seed;
  } paths;

  int threads = 1;

  /// Throws std::invalid_argument when a numeric field is out of range.
  void validate() const;
  nlohmann::json to_json() const;
  /// Stable hash of the canonical JSON form, recorded in run manifests.
  std::string hash() const;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load_file(const std::string& path);
};

}  // namespace analog
