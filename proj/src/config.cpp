#include "analog/config.hpp"

#include <fstream>
#include <stdexcept>

#include "analog/transcript.hpp"

namespace analog {

using nlohmann::json;

void RunConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(selection.n >= 1, "selection.n must be >= 1");
  require(selection.k >= 1, "selection.k must be >= 1");
  require(selection.x >= 1 && selection.x <= selection.k,
          "selection.x must lie in [1, selection.k]");
  require(selection.sim_cutoff > 0.0 && selection.sim_cutoff <= 1.0,
          "selection.sim_cutoff must lie in (0, 1]");
  require(selection.low_threshold >= 1, "selection.low_threshold must be >= 1");
  require(selection.high_threshold_floor >= 1, "selection.high_threshold_floor must be >= 1");
  require(selection.high_threshold_frac > 0.0 && selection.high_threshold_frac <= 1.0,
          "selection.high_threshold_frac must lie in (0, 1]");
  require(simplification.sample_count >= simplification.quota && simplification.quota >= 1,
          "simplification requires sample_count >= quota >= 1");
  require(simplification.max_iters >= 0, "simplification.max_iters must be >= 0");
  require(inference.k >= 1, "inference.k must be >= 1");
  if (inference.no_repeat_cutoff)
    require(*inference.no_repeat_cutoff > 0.0 && *inference.no_repeat_cutoff <= 1.0,
            "inference.no_repeat_cutoff must lie in (0, 1]");
  require(oracle.concurrency >= 1, "oracle.concurrency must be >= 1");
  require(oracle.max_retries >= 0, "oracle.max_retries must be >= 0");
  require(threads >= 1, "threads must be >= 1");
  require(oracle.backend == "scripted" || oracle.backend == "replay" ||
              oracle.backend == "live" || oracle.backend == "cache",
          "oracle.backend must be one of scripted|replay|live|cache");
}

json RunConfig::to_json() const {
  json j;
  j["selection"] = {{"n", selection.n},
                    {"k", selection.k},
                    {"x", selection.x},
                    {"high_threshold_floor", selection.high_threshold_floor},
                    {"high_threshold_frac", selection.high_threshold_frac},
                    {"low_threshold", selection.low_threshold},
                    {"sim_cutoff", selection.sim_cutoff},
                    {"max_error_questions", selection.max_error_questions},
                    {"min_oracle_calls", selection.min_oracle_calls}};
  j["simplification"] = {{"sample_count", simplification.sample_count},
                         {"quota", simplification.quota},
                         {"max_iters", simplification.max_iters}};
  j["inference"] = {{"k", inference.k}, {"rag", inference.rag}};
  if (inference.no_repeat_cutoff) j["inference"]["no_repeat_cutoff"] = *inference.no_repeat_cutoff;
  j["oracle"] = {{"backend", oracle.backend},
                 {"endpoint", oracle.endpoint},
                 {"script_path", oracle.script_path},
                 {"cache_path", oracle.cache_path},
                 {"concurrency", oracle.concurrency},
                 {"max_retries", oracle.max_retries}};
  j["paths"] = {{"input", paths.input},
                {"output", paths.output},
                {"journal", paths.journal},
                {"seed", paths.seed}};
  j["threads"] = threads;
  return j;
}

std::string RunConfig::hash() const { return oracle::fnv1a64_hex(to_json().dump()); }

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg;
  if (j.contains("selection")) {
    const auto& s = j.at("selection");
    cfg.selection.n = s.value("n", cfg.selection.n);
    cfg.selection.k = s.value("k", cfg.selection.k);
    cfg.selection.x = s.value("x", cfg.selection.x);
    cfg.selection.high_threshold_floor =
        s.value("high_threshold_floor", cfg.selection.high_threshold_floor);
    cfg.selection.high_threshold_frac =
        s.value("high_threshold_frac", cfg.selection.high_threshold_frac);
    cfg.selection.low_threshold = s.value("low_threshold", cfg.selection.low_threshold);
    cfg.selection.sim_cutoff = s.value("sim_cutoff", cfg.selection.sim_cutoff);
    cfg.selection.max_error_questions =
        s.value("max_error_questions", cfg.selection.max_error_questions);
    cfg.selection.min_oracle_calls = s.value("min_oracle_calls", cfg.selection.min_oracle_calls);
  }
  if (j.contains("simplification")) {
    const auto& s = j.at("simplification");
    cfg.simplification.sample_count = s.value("sample_count", cfg.simplification.sample_count);
    cfg.simplification.quota = s.value("quota", cfg.simplification.quota);
    cfg.simplification.max_iters = s.value("max_iters", cfg.simplification.max_iters);
  }
  if (j.contains("inference")) {
    const auto& s = j.at("inference");
    cfg.inference.k = s.value("k", cfg.inference.k);
    cfg.inference.rag = s.value("rag", cfg.inference.rag);
    if (s.contains("no_repeat_cutoff"))
      cfg.inference.no_repeat_cutoff = s.at("no_repeat_cutoff").get<double>();
  }
  if (j.contains("oracle")) {
    const auto& s = j.at("oracle");
    cfg.oracle.backend = s.value("backend", cfg.oracle.backend);
    cfg.oracle.endpoint = s.value("endpoint", cfg.oracle.endpoint);
    cfg.oracle.script_path = s.value("script_path", cfg.oracle.script_path);
    cfg.oracle.cache_path = s.value("cache_path", cfg.oracle.cache_path);
    cfg.oracle.concurrency = s.value("concurrency", cfg.oracle.concurrency);
    cfg.oracle.max_retries = s.value("max_retries", cfg.oracle.max_retries);
  }
  if (j.contains("paths")) {
    const auto& s = j.at("paths");
    cfg.paths.input = s.value("input", cfg.paths.input);
    cfg.paths.output = s.value("output", cfg.paths.output);
    cfg.paths.journal = s.value("journal", cfg.paths.journal);
    cfg.paths.seed = s.value("seed", cfg.paths.seed);
  }
  cfg.threads = j.value("threads", cfg.threads);
  return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed config file " + path + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace analog
