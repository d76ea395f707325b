#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "analog/backend.hpp"
#include "analog/data.hpp"
#include "analog/interp.hpp"
#include "analog/question.hpp"

#include <nlohmann/json.hpp>

namespace analog::simplify {

/// One known statement about the question. folded_iteration is -1 for the
/// statements extracted up front, otherwise the iteration that produced it.
struct KnownCondition {
  std::string statement;
  int folded_iteration = -1;
};

struct KnownConditions {
  std::vector<KnownCondition> statements;

  bool empty() const { return statements.empty(); }
  /// All statements joined by single spaces, the form fed back into prompts.
  std::string joined() const;
};

struct NextQuestion {
  bool terminal = false;
  std::string text;
  std::string note;
};

struct ConsensusResult {
  std::optional<Value> value;
  std::vector<dsl::ExecutionOutcome> outcomes;
  /// Canonical sources of the programs in the winning cluster, sample order.
  std::vector<std::string> consensus_sources;
  /// Winning cluster absorbed every sample (the stricter all-agree reading).
  bool unanimous = false;
  int invalid_count = 0;
};

struct IterationRecord {
  int iteration = 0;
  std::optional<std::string> next_question;
  bool terminal = false;
  std::optional<std::string> answer_display;
  std::optional<std::string> folded_statement;
  std::vector<dsl::ExecutionOutcome> outcomes;
  std::optional<Value> consensus;
  bool unanimous = false;
};

struct SimplificationJournal {
  enum class Status { Consensus, TerminalNoConsensus, BudgetExhausted };

  std::string question_id;
  std::vector<IterationRecord> iterations;
  Status status = Status::BudgetExhausted;
  std::string note;
  std::vector<data::SupervisionInstance> instances;

  /// Iteration index at which consensus was reached, -1 otherwise.
  int consensus_iteration() const;
  nlohmann::json to_json() const;
};

std::string status_name(SimplificationJournal::Status s);

struct IterationStats {
  struct Row {
    int iteration = 0;
    int instances_gained = 0;
    std::optional<double> accuracy_vs_gold;  // percentage
    double collected_pct = 0.0;
  };
  std::vector<Row> rows;
  int total_journals = 0;

  std::string render_table() const;
  nlohmann::json to_json() const;
};

struct SimplifyOptions {
  int sample_count = 10;
  int quota = 9;
  int max_iters = 5;
  dsl::ExecutionLimits limits;
  int threads = 1;
};

KnownConditions initial_conditions(const data::QuestionRecord& q, oracle::Client& client);

/// Terminal when the oracle output contains "no more decomposition"
/// (case-insensitive) or is empty.
NextQuestion next_question(const data::QuestionRecord& q, const KnownConditions& kc,
                           oracle::Client& client);

/// Answers nq against kc, folds the (question, answer) pair into a statement
/// and appends it. Returns false when no numeric answer could be extracted;
/// kc is untouched in that case.
bool answer_and_fold(KnownConditions& kc, const std::string& nq, int iteration,
                     oracle::Client& client, IterationRecord& record);

ConsensusResult propose_and_check(const data::QuestionRecord& q, const KnownConditions& kc,
                                  int sample_count, int quota, oracle::Client& client,
                                  const dsl::ExecutionLimits& limits);

SimplificationJournal run_simplification(const data::QuestionRecord& q,
                                         const SimplifyOptions& options, oracle::Client& client);

std::vector<SimplificationJournal> run_simplification_all(
    const std::vector<data::QuestionRecord>& questions, const SimplifyOptions& options,
    oracle::Client& client);

/// gold maps question id to the gold numeric answer; accuracy columns are
/// omitted when it is empty.
IterationStats collect_stats(const std::vector<SimplificationJournal>& journals,
                             const std::map<std::string, double>& gold = {});

}  // namespace analog::simplify
