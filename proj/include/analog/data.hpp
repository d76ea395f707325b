#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "analog/backend.hpp"
#include "analog/question.hpp"
#include "analog/templates.hpp"

namespace analog::data {

/// One trainer-ready (input, target) pair with its template identity and
/// provenance. The task id is preserved because the multi-function model
/// distinguishes sub-tasks purely by template.
struct SupervisionInstance {
  oracle::TaskId task = oracle::TaskId::Q2P;
  std::string input_text;
  std::string target_text;
  enum class Origin { Seed, ConceptQ2P, ConceptAq2P, Simplification } origin = Origin::Seed;
  std::string origin_question_id;
  std::string provenance;  // journal pointer

  static const char* origin_name(Origin o);
  nlohmann::json to_json() const;
  static SupervisionInstance from_json(const nlohmann::json& j);
};

struct IngestReport {
  std::size_t total_lines = 0;
  std::size_t malformed = 0;
  std::vector<std::string> warnings;
};

/// Reads question records. Formats: "jsonl" (our normalized schema),
/// "gsm8k" (question/answer with the #### marker), "strategyqa"
/// (qid/question/answer boolean). Malformed lines are skipped and counted;
/// more than 10% malformed is fatal.
std::vector<QuestionRecord> ingest(const std::string& path, const std::string& format,
                                   IngestReport* report = nullptr);

/// Rewrites a multiple-choice record into a yes/no record whose correct
/// answer is yes, via the binary-transform template.
QuestionRecord to_binary(const QuestionRecord& q, oracle::Client& client);

struct EmitManifest {
  std::map<std::string, std::size_t> counts_per_origin;
  std::size_t emitted = 0;
  std::size_t rejected_unparseable = 0;
  std::size_t deduplicated = 0;
  std::string seed_source;  // flags synthetic stand-in seed data
  nlohmann::json to_json() const;
};

/// Combines seed instances (file order) with self-supervision instances
/// (sorted by origin, question id, task, input) into one deterministic
/// JSONL. Program-target instances that fail to parse are rejected and
/// counted; duplicate (input, target) pairs are dropped and counted.
EmitManifest emit_training(const std::vector<SupervisionInstance>& instances,
                           const std::string& seed_fixture_path, const std::string& out_path);

struct Prediction {
  std::string question_id;
  oracle::Answer value;
  std::string pass;  // first | rag
};

struct Metrics {
  double overall_accuracy = 0.0;
  std::map<std::string, double> per_split;
  std::map<std::string, double> per_dataset;
  std::size_t evaluated = 0;
  std::size_t excluded_missing_gold = 0;
  nlohmann::json to_json() const;
};

/// Accuracy overall and per split/dataset. Binary predictions compare
/// yes/no exactly; numeric predictions compare with soft tolerance; an
/// unknown prediction never matches.
Metrics evaluate(const std::vector<Prediction>& predictions,
                 const std::vector<QuestionRecord>& records);

std::vector<Prediction> read_predictions(const std::string& path);

}  // namespace analog::data
