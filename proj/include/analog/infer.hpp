#pragma once

#include <optional>
#include <string>
#include <vector>

#include "analog/answers.hpp"
#include "analog/backend.hpp"
#include "analog/conceptualize.hpp"
#include "analog/interp.hpp"
#include "analog/question.hpp"
#include "analog/similarity.hpp"

namespace analog::infer {

struct VotedProgram {
  std::string raw_source;
  std::optional<dsl::ProgramAst> program;
  dsl::ExecutionOutcome outcome;
};

struct VotedAnswer {
  enum class Pass { First, Rag };

  oracle::Answer value = oracle::Answer::unknown();
  /// display string of each concrete vote cluster -> size, cluster order.
  std::vector<std::pair<std::string, int>> vote_counts;
  std::vector<VotedProgram> programs;
  Pass pass = Pass::First;
  /// Second pass was requested but no oracle queries were available to feed it.
  bool rag_skipped_no_queries = false;

  nlohmann::json to_json(const std::string& question_id) const;
};

struct InferOptions {
  int k = 10;
  dsl::ExecutionLimits limits;
};

/// Majority-votes already-executed programs. Ties break toward the cluster
/// holding the earliest sample. Exposed so ablations can re-vote a filtered
/// program list.
VotedAnswer vote_programs(std::vector<VotedProgram> programs, VotedAnswer::Pass pass);

/// Samples k programs for the question, executes them, and majority-votes the
/// executed values. Ties break toward the cluster holding the earliest sample.
VotedAnswer first_pass(const data::QuestionRecord& q, int k, oracle::Client& client,
                       const dsl::ExecutionLimits& limits = {});

/// Runs only when the first pass voted unknown: asks the oracle to answer each
/// first-pass query with a short paragraph, then re-votes programs conditioned
/// on the concatenated paragraphs. Otherwise returns `first` unchanged.
VotedAnswer rag_second_pass(const data::QuestionRecord& q, VotedAnswer first, int k,
                            oracle::Client& client, const dsl::ExecutionLimits& limits = {});

/// Samples k abstract-question programs; returns the first one that parses
/// and uses every parameter. Throws std::runtime_error if none qualifies.
dsl::ProgramAst conceptual_answer(const conceptualize::AbstractQuestion& aq, int k,
                                  oracle::Client& client);

/// Drops programs whose oracle queries nearly restate the original question.
/// cutoff must lie in (0, 1]; anything else is a configuration error.
std::vector<VotedProgram> no_repeat_filter(std::vector<VotedProgram> programs,
                                           const std::string& original, double cutoff,
                                           oracle::SimilarityBackend& similarity);

}  // namespace analog::infer
