#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "analog/completion.hpp"
#include "analog/data.hpp"
#include "analog/similarity.hpp"
#include "analog/validate.hpp"

namespace analog::conceptualize {

/// A question with its concrete values lifted into named parameters.
struct AbstractQuestion {
  std::string text_with_placeholders;
  std::vector<std::pair<std::string, ValueKind>> parameters;
  std::string source_question_id;
  std::optional<dsl::ParameterBinding> source_binding;
};

struct SimilarQuestion {
  data::QuestionRecord record;
  std::optional<oracle::Answer> silver;  // present iff the confidence gate passed
  std::optional<std::string> chosen_cot;
};

struct SimilarQuestionSet {
  AbstractQuestion abstract;
  std::vector<SimilarQuestion> similars;
  /// M: similars carrying a (concrete) silver label.
  int silver_count() const;
};

struct PerQuestionResult {
  std::string question_id;
  dsl::ExecutionOutcome outcome;
  std::optional<dsl::ParameterBinding> binding_used;
  bool matches_silver = false;
};

struct CandidateProgram {
  std::optional<dsl::ProgramAst> program;  // absent: parse failure (invalid candidate)
  std::string raw_source;
  std::string parse_error;
  std::string origin_question_id;
  std::optional<dsl::ParameterBinding> own_binding;
  dsl::ValidationReport validation;
  std::vector<PerQuestionResult> per_question_results;

  bool valid() const { return program.has_value(); }
  int match_count() const;
  int error_count() const;
  /// All oracle queries attributable to this program: runtime trace queries
  /// plus static string-literal queries.
  std::vector<std::string> all_queries() const;
};

struct SelectionConfig {
  int n = 20;                        // similar questions per abstract question
  int k = 10;                        // CoT samples per similar question
  int x = 9;                         // agreement needed among the K samples
  int high_threshold_floor = 3;      // max(floor, frac * M)
  double high_threshold_frac = 0.75;
  int low_threshold = 2;
  double sim_cutoff = 0.95;          // drop: query paraphrases the original
  int max_error_questions = 2;       // drop: errors on more than this many
  int min_oracle_calls = 2;          // drop: fewer oracle calls than this
};

/// High-accuracy threshold: max(floor, frac * M), no rounding.
double high_threshold(int m, const SelectionConfig& cfg);

enum class DropCriterion { Similarity, Complexity, Soundness };

/// Single drop-criterion verdict; true means the candidate survives it.
bool passes_criterion(const CandidateProgram& candidate, DropCriterion criterion,
                      const SelectionConfig& cfg, const std::string& original_question,
                      oracle::SimilarityBackend& similarity);

struct SelectionResult {
  std::vector<std::size_t> high_pass;  // indices into the candidate list
  std::vector<std::size_t> low_pass;   // superset of high_pass
  std::vector<std::string> drop_reasons;  // per candidate; empty = survivor
  int m = 0;
};

/// Applies the similarity/complexity/soundness drop filters (in the given
/// order, which must not matter) then the accuracy thresholds.
SelectionResult apply_selection(const std::vector<CandidateProgram>& candidates,
                                const SimilarQuestionSet& set, const SelectionConfig& cfg,
                                oracle::SimilarityBackend& similarity,
                                const std::string& original_question,
                                const std::vector<DropCriterion>& order = {
                                    DropCriterion::Similarity, DropCriterion::Complexity,
                                    DropCriterion::Soundness});

// ---- individual pipeline stages ----

struct ExtractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses an abstraction completion ("...the question becomes <text> With
/// parameters a=1, ..."). Exposed for tests.
AbstractQuestion parse_abstraction(const std::string& completion,
                                   const std::string& source_question_id);

AbstractQuestion abstract_question(const data::QuestionRecord& q, oracle::Client& client);

std::vector<data::QuestionRecord> generate_similars(const AbstractQuestion& aq, int n,
                                                    oracle::Client& client);

/// Samples k CoTs and returns the majority answer plus one agreeing CoT
/// when the modal concrete answer count reaches x; otherwise absent.
std::optional<std::pair<oracle::Answer, std::string>> confidence_gate(
    const data::QuestionRecord& q, int k, int x, oracle::Client& client);

/// Pure gate rule over extracted answers; the enumeration oracle target.
std::optional<oracle::Answer> gate_decision(const std::vector<oracle::Answer>& answers, int x);

CandidateProgram generate_candidate(const data::QuestionRecord& q, const std::string& cot,
                                    oracle::Client& client);

/// Name-match against the question's own binding, then an auxiliary q2p
/// query. Absent means binding failure (counts as an execution error).
std::optional<dsl::ParameterBinding> bind_for_question(const dsl::ProgramAst& program,
                                                       const data::QuestionRecord& q,
                                                       oracle::Client& client);

/// Executes every candidate against every silver-bearing similar question.
void execute_candidates(std::vector<CandidateProgram>& candidates, const SimilarQuestionSet& set,
                        oracle::Client& client, const dsl::ExecutionLimits& limits);

/// The function definitions with any trailing concrete invocation removed.
std::string strip_answer_call(const dsl::ProgramAst& program);

std::vector<data::SupervisionInstance> formulate_instances(
    const SelectionResult& selection, const std::vector<CandidateProgram>& candidates,
    const SimilarQuestionSet& set);

// ---- orchestration ----

struct ConceptOptions {
  SelectionConfig selection;
  dsl::ExecutionLimits limits;
  int threads = 1;
};

struct ConceptResult {
  std::vector<data::SupervisionInstance> instances;
  std::vector<nlohmann::json> journal;  // one record per question, input order
};

/// Runs the full conceptualization pipeline. Never reads gold labels
/// (enforced by an ExtractionScope for the whole run). Deterministic given
/// a deterministic oracle, independent of thread count.
ConceptResult run_conceptualization(const std::vector<data::QuestionRecord>& questions,
                                    const ConceptOptions& options, oracle::Client& client,
                                    oracle::SimilarityBackend& similarity);

}  // namespace analog::conceptualize
