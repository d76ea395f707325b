// Command-line front end: wires config, oracle backends, and the extraction/
// inference/evaluation pipelines into replayable runs. Every run writes a
// manifest carrying the config hash next to its primary output.

#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "analog/config.hpp"
#include "analog/data.hpp"
#include "analog/infer.hpp"
#include "analog/simplify.hpp"

using namespace analog;
using nlohmann::json;

namespace {

std::shared_ptr<oracle::Backend> make_backend(const RunConfig& cfg) {
  const auto& o = cfg.oracle;
  if (o.backend == "scripted") {
    if (o.script_path.empty())
      throw std::invalid_argument("scripted backend requires --script");
    return std::make_shared<oracle::ScriptedBackend>(
        oracle::ScriptedBackend::from_json_file(o.script_path));
  }
  if (o.backend == "replay") {
    if (o.cache_path.empty()) throw std::invalid_argument("replay backend requires --cache");
    return std::make_shared<oracle::ReplayBackend>(o.cache_path);
  }
  std::shared_ptr<oracle::Backend> live;
  if (!o.endpoint.empty())
    live = std::make_shared<oracle::HttpBackend>(o.endpoint, "", "analog");
  else
    live = oracle::HttpBackend::from_env("analog");
  if (o.backend == "cache") {
    if (o.cache_path.empty()) throw std::invalid_argument("cache backend requires --cache");
    return std::make_shared<oracle::CachingBackend>(std::move(live), o.cache_path);
  }
  return live;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  return out;
}

void write_manifest(const RunConfig& cfg, const std::string& command, const json& extra) {
  if (cfg.paths.output.empty()) return;
  json manifest = {{"command", command},
                   {"config_hash", cfg.hash()},
                   {"config", cfg.to_json()},
                   {"results", extra}};
  auto out = open_out(cfg.paths.output + ".manifest.json");
  out << manifest.dump(2) << "\n";
}

std::vector<data::QuestionRecord> load_questions(const RunConfig& cfg,
                                                 const std::string& format) {
  if (cfg.paths.input.empty()) throw std::invalid_argument("--input is required");
  data::IngestReport report;
  auto questions = data::ingest(cfg.paths.input, format, &report);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return questions;
}

int cmd_extract_concept(const RunConfig& cfg, const std::string& format) {
  auto questions = load_questions(cfg, format);
  oracle::Client client(make_backend(cfg), cfg.oracle.concurrency, cfg.oracle.max_retries);
  auto similarity = oracle::default_similarity();

  conceptualize::ConceptOptions options;
  options.selection = cfg.selection;
  options.threads = cfg.threads;
  auto result = conceptualize::run_conceptualization(questions, options, client, *similarity);

  auto out = open_out(cfg.paths.output);
  for (const auto& inst : result.instances) out << inst.to_json().dump() << "\n";
  if (!cfg.paths.journal.empty()) {
    auto jout = open_out(cfg.paths.journal);
    for (const auto& entry : result.journal) jout << entry.dump() << "\n";
  }
  write_manifest(cfg, "extract-concept",
                 {{"questions", questions.size()},
                  {"instances", result.instances.size()},
                  {"gold_reads_in_extraction", data::ExtractionScope::gold_reads()}});
  return 0;
}

int cmd_extract_simplify(const RunConfig& cfg, const std::string& format) {
  auto questions = load_questions(cfg, format);
  oracle::Client client(make_backend(cfg), cfg.oracle.concurrency, cfg.oracle.max_retries);

  simplify::SimplifyOptions options;
  options.sample_count = cfg.simplification.sample_count;
  options.quota = cfg.simplification.quota;
  options.max_iters = cfg.simplification.max_iters;
  options.threads = cfg.threads;
  auto journals = simplify::run_simplification_all(questions, options, client);

  auto out = open_out(cfg.paths.output);
  std::size_t instances = 0;
  for (const auto& j : journals) {
    instances += j.instances.size();
    for (const auto& inst : j.instances) out << inst.to_json().dump() << "\n";
  }
  if (!cfg.paths.journal.empty()) {
    auto jout = open_out(cfg.paths.journal);
    for (const auto& j : journals) jout << j.to_json().dump() << "\n";
  }
  auto stats = simplify::collect_stats(journals);
  std::cout << stats.render_table();
  write_manifest(cfg, "extract-simplify",
                 {{"questions", questions.size()},
                  {"instances", instances},
                  {"stats", stats.to_json()}});
  return 0;
}

int cmd_emit_train(const RunConfig& cfg) {
  if (cfg.paths.input.empty()) throw std::invalid_argument("--input is required");
  std::ifstream in(cfg.paths.input);
  if (!in) throw std::invalid_argument("cannot open input file: " + cfg.paths.input);
  std::vector<data::SupervisionInstance> instances;
  std::string line;
  while (std::getline(in, line)) {
    if (trim_copy(line).empty()) continue;
    instances.push_back(data::SupervisionInstance::from_json(json::parse(line)));
  }
  auto manifest = data::emit_training(instances, cfg.paths.seed, cfg.paths.output);
  write_manifest(cfg, "emit-train", manifest.to_json());
  std::cout << manifest.to_json().dump(2) << "\n";
  return 0;
}

int cmd_infer(const RunConfig& cfg, const std::string& format) {
  auto questions = load_questions(cfg, format);
  oracle::Client client(make_backend(cfg), cfg.oracle.concurrency, cfg.oracle.max_retries);
  auto similarity = oracle::default_similarity();

  auto out = open_out(cfg.paths.output);
  std::size_t rag_passes = 0;
  for (const auto& q : questions) {
    auto voted = infer::first_pass(q, cfg.inference.k, client);
    if (cfg.inference.no_repeat_cutoff) {
      auto kept = infer::no_repeat_filter(std::move(voted.programs), q.text,
                                          *cfg.inference.no_repeat_cutoff, *similarity);
      voted = infer::vote_programs(std::move(kept), infer::VotedAnswer::Pass::First);
    }
    if (cfg.inference.rag) {
      voted = infer::rag_second_pass(q, std::move(voted), cfg.inference.k, client);
      rag_passes += voted.pass == infer::VotedAnswer::Pass::Rag;
    }
    out << voted.to_json(q.id).dump() << "\n";
  }
  write_manifest(cfg, "infer", {{"questions", questions.size()}, {"rag_passes", rag_passes}});
  return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& format, const std::string& predictions) {
  auto questions = load_questions(cfg, format);
  auto preds = data::read_predictions(predictions);
  auto metrics = data::evaluate(preds, questions);
  std::cout << metrics.to_json().dump(2) << "\n";
  if (!cfg.paths.output.empty()) {
    auto out = open_out(cfg.paths.output);
    out << metrics.to_json().dump(2) << "\n";
    write_manifest(cfg, "eval", metrics.to_json());
  }
  return 0;
}

int cmd_stats(const RunConfig& cfg, const std::vector<std::string>& journal_paths) {
  // reconstruct the minimum of each journal that stats need: id, status,
  // and the final iteration's index and consensus value
  std::vector<simplify::SimplificationJournal> journals;
  for (const auto& path : journal_paths) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open journal file: " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (trim_copy(line).empty()) continue;
      json j = json::parse(line);
      simplify::SimplificationJournal journal;
      journal.question_id = j.value("question_id", "");
      std::string status = j.value("status", "budget_exhausted");
      journal.status = status == "consensus"
                           ? simplify::SimplificationJournal::Status::Consensus
                       : status == "terminal_no_consensus"
                           ? simplify::SimplificationJournal::Status::TerminalNoConsensus
                           : simplify::SimplificationJournal::Status::BudgetExhausted;
      for (const auto& it : j.value("iterations", json::array())) {
        simplify::IterationRecord record;
        record.iteration = it.value("iteration", 0);
        if (it.contains("consensus"))
          record.consensus = Value::decimal(std::stod(it.at("consensus").get<std::string>()));
        journal.iterations.push_back(std::move(record));
      }
      journals.push_back(std::move(journal));
    }
  }
  auto stats = simplify::collect_stats(journals);
  std::cout << stats.render_table();
  if (!cfg.paths.output.empty()) {
    auto out = open_out(cfg.paths.output);
    out << stats.to_json().dump(2) << "\n";
    write_manifest(cfg, "stats", stats.to_json());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-supervised analogical learning pipelines"};
  app.require_subcommand(1);

  std::string config_path, format = "jsonl", predictions;
  std::vector<std::string> journal_paths;
  RunConfig flag_cfg;  // flag values land here, overriding the file config
  bool rag = false;
  double no_repeat = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--backend", flag_cfg.oracle.backend,
                    "oracle backend: scripted|replay|live|cache");
    cmd->add_option("--script", flag_cfg.oracle.script_path, "scripted backend rules JSON");
    cmd->add_option("--cache", flag_cfg.oracle.cache_path, "completion cache JSONL");
    cmd->add_option("--endpoint", flag_cfg.oracle.endpoint, "live endpoint base URL");
    cmd->add_option("--concurrency", flag_cfg.oracle.concurrency, "max in-flight oracle calls");
    cmd->add_option("--threads", flag_cfg.threads, "worker threads across questions");
    cmd->add_option("--input", flag_cfg.paths.input, "input JSONL");
    cmd->add_option("--output", flag_cfg.paths.output, "output file");
    cmd->add_option("--journal", flag_cfg.paths.journal, "journal JSONL");
    cmd->add_option("--format", format, "input format: jsonl|gsm8k|strategyqa");
  };

  auto* concept_cmd = app.add_subcommand("extract-concept", "conceptualization extraction");
  add_common(concept_cmd);
  concept_cmd->add_option("-n,--similars", flag_cfg.selection.n, "similar questions per item");
  concept_cmd->add_option("-k,--cot-samples", flag_cfg.selection.k, "CoT samples per question");
  concept_cmd->add_option("-x,--agreement", flag_cfg.selection.x, "CoT agreement quota");

  auto* simplify_cmd = app.add_subcommand("extract-simplify", "math simplification extraction");
  add_common(simplify_cmd);
  simplify_cmd->add_option("--samples", flag_cfg.simplification.sample_count,
                           "programs sampled per iteration");
  simplify_cmd->add_option("--quota", flag_cfg.simplification.quota, "consensus quota");
  simplify_cmd->add_option("--max-iters", flag_cfg.simplification.max_iters,
                           "decomposition iteration budget");

  auto* emit_cmd = app.add_subcommand("emit-train", "merge seed + extracted instances");
  add_common(emit_cmd);
  emit_cmd->add_option("--seed", flag_cfg.paths.seed, "seed instances JSONL");

  auto* infer_cmd = app.add_subcommand("infer", "answer questions by program voting");
  add_common(infer_cmd);
  infer_cmd->add_option("--k", flag_cfg.inference.k, "candidate programs per question");
  infer_cmd->add_flag("--rag", rag, "retrieval-augmented second pass on unknown");
  auto* no_repeat_opt =
      infer_cmd->add_option("--no-repeat", no_repeat, "drop near-verbatim query programs");

  auto* eval_cmd = app.add_subcommand("eval", "score predictions against gold");
  add_common(eval_cmd);
  eval_cmd->add_option("--predictions", predictions, "predictions JSONL")->required();

  auto* stats_cmd = app.add_subcommand("stats", "iteration statistics from journals");
  add_common(stats_cmd);
  stats_cmd->add_option("--journals", journal_paths, "journal JSONL files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load_file(config_path);
    // flags override the file; only explicitly passed options differ from defaults
    auto override_if = [&](auto& target, const auto& flag_value, const auto& default_value) {
      if (!(flag_value == default_value)) target = flag_value;
    };
    RunConfig defaults;
    override_if(cfg.oracle.backend, flag_cfg.oracle.backend, defaults.oracle.backend);
    override_if(cfg.oracle.script_path, flag_cfg.oracle.script_path, defaults.oracle.script_path);
    override_if(cfg.oracle.cache_path, flag_cfg.oracle.cache_path, defaults.oracle.cache_path);
    override_if(cfg.oracle.endpoint, flag_cfg.oracle.endpoint, defaults.oracle.endpoint);
    override_if(cfg.oracle.concurrency, flag_cfg.oracle.concurrency, defaults.oracle.concurrency);
    override_if(cfg.threads, flag_cfg.threads, defaults.threads);
    override_if(cfg.paths.input, flag_cfg.paths.input, defaults.paths.input);
    override_if(cfg.paths.output, flag_cfg.paths.output, defaults.paths.output);
    override_if(cfg.paths.journal, flag_cfg.paths.journal, defaults.paths.journal);
    override_if(cfg.paths.seed, flag_cfg.paths.seed, defaults.paths.seed);
    override_if(cfg.selection.n, flag_cfg.selection.n, defaults.selection.n);
    override_if(cfg.selection.k, flag_cfg.selection.k, defaults.selection.k);
    override_if(cfg.selection.x, flag_cfg.selection.x, defaults.selection.x);
    override_if(cfg.simplification.sample_count, flag_cfg.simplification.sample_count,
                defaults.simplification.sample_count);
    override_if(cfg.simplification.quota, flag_cfg.simplification.quota,
                defaults.simplification.quota);
    override_if(cfg.simplification.max_iters, flag_cfg.simplification.max_iters,
                defaults.simplification.max_iters);
    override_if(cfg.inference.k, flag_cfg.inference.k, defaults.inference.k);
    if (rag) cfg.inference.rag = true;
    if (no_repeat_opt->count() > 0) cfg.inference.no_repeat_cutoff = no_repeat;
    cfg.validate();

    if (app.got_subcommand(concept_cmd)) return cmd_extract_concept(cfg, format);
    if (app.got_subcommand(simplify_cmd)) return cmd_extract_simplify(cfg, format);
    if (app.got_subcommand(emit_cmd)) return cmd_emit_train(cfg);
    if (app.got_subcommand(infer_cmd)) return cmd_infer(cfg, format);
    if (app.got_subcommand(eval_cmd)) return cmd_eval(cfg, format, predictions);
    if (app.got_subcommand(stats_cmd)) return cmd_stats(cfg, journal_paths);
    return 1;
  } catch (const oracle::OracleUnavailable& e) {
    std::cerr << "error: oracle unavailable: " << e.what() << "\n";
    return 2;
  } catch (const oracle::ReplayMiss& e) {
    std::cerr << "error: replay cache miss: " << e.what() << "\n";
    return 2;
  } catch (const oracle::TransportError& e) {
    std::cerr << "error: transport failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
