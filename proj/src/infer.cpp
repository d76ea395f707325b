#include "analog/infer.hpp"

#include <set>
#include <stdexcept>

#include "analog/completion.hpp"
#include "analog/parser.hpp"
#include "analog/templates.hpp"
#include "analog/validate.hpp"

namespace analog::infer {

using data::QuestionRecord;
using nlohmann::json;
using oracle::Answer;

namespace {

std::optional<Answer> value_to_answer(const Value& v) {
  if (v.is_boolean()) return v.as_boolean() ? Answer::yes() : Answer::no();
  if (v.is_number()) return Answer::number(v.as_number());
  return std::nullopt;  // bare text never votes
}

VotedProgram run_sample(const std::string& completion, const QuestionRecord& q,
                        oracle::Client& client, const dsl::ExecutionLimits& limits) {
  VotedProgram sample;
  auto split = dsl::split_program_completion(completion);
  sample.raw_source = split.source;
  std::optional<dsl::ProgramAst> program;
  try {
    program = dsl::parse_program(split.source);
  } catch (const dsl::ParseError& e) {
    sample.outcome.status = dsl::ExecStatus::Error;
    sample.outcome.error_message = e.what();
    return sample;
  }

  dsl::ParameterBinding binding;
  const auto source = split.binding ? split.binding : q.binding;
  for (const auto& p : program->entry_params()) {
    if (!source || !source->count(p.name)) {
      sample.program = std::move(program);
      sample.outcome.status = dsl::ExecStatus::Error;
      sample.outcome.error_message = "binding failure";
      return sample;
    }
    binding.emplace(p.name, source->at(p.name));
  }
  sample.outcome = dsl::execute_program(*program, binding, client, limits);
  sample.program = std::move(program);
  return sample;
}

}  // namespace

VotedAnswer vote_programs(std::vector<VotedProgram> programs, VotedAnswer::Pass pass) {
  VotedAnswer result;
  result.pass = pass;

  struct Cluster {
    Answer answer;
    Value value;
    int count = 0;
    std::size_t first_index = 0;
  };
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < programs.size(); ++i) {
    const auto& outcome = programs[i].outcome;
    if (outcome.status != dsl::ExecStatus::Value) continue;
    auto answer = value_to_answer(*outcome.value);
    if (!answer) continue;
    bool placed = false;
    for (auto& c : clusters) {
      if (soft_equal(c.value, *outcome.value)) {
        ++c.count;
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({*answer, *outcome.value, 1, i});
  }

  const Cluster* best = nullptr;
  for (const auto& c : clusters) {
    // tie goes to the cluster whose first member was sampled earliest
    if (!best || c.count > best->count ||
        (c.count == best->count && c.first_index < best->first_index))
      best = &c;
  }
  if (best) result.value = best->answer;
  for (const auto& c : clusters) result.vote_counts.emplace_back(c.answer.display(), c.count);
  result.programs = std::move(programs);
  return result;
}

namespace {

std::vector<std::string> collect_queries(const std::vector<VotedProgram>& programs) {
  std::vector<std::string> queries;
  std::set<std::string> seen;
  auto add = [&](const std::string& q) {
    if (seen.insert(q).second) queries.push_back(q);
  };
  for (const auto& p : programs) {
    for (const auto& t : p.outcome.oracle_trace) add(t.query);
    if (p.program)
      for (const auto& q : dsl::static_oracle_queries(*p.program)) add(q);
  }
  return queries;
}

}  // namespace

json VotedAnswer::to_json(const std::string& question_id) const {
  json counts = json::object();
  for (const auto& [display, count] : vote_counts) counts[display] = count;
  json out = {{"question_id", question_id},
              {"value", value.display()},
              {"pass", pass == Pass::First ? "first" : "rag"},
              {"vote_counts", std::move(counts)},
              {"program_count", programs.size()}};
  if (rag_skipped_no_queries) out["rag_skipped_no_queries"] = true;
  return out;
}

VotedAnswer first_pass(const QuestionRecord& q, int k, oracle::Client& client,
                       const dsl::ExecutionLimits& limits) {
  oracle::Sampling sampling;
  sampling.temperature = 0.7;
  sampling.n = k;
  auto transcript = oracle::render_template(oracle::TaskId::Q2P, {{"q", q.text}}, sampling);
  auto completions = client.complete(transcript);

  std::vector<VotedProgram> programs;
  programs.reserve(completions.size());
  for (const auto& c : completions) programs.push_back(run_sample(c, q, client, limits));
  return vote_programs(std::move(programs), VotedAnswer::Pass::First);
}

VotedAnswer rag_second_pass(const QuestionRecord& q, VotedAnswer first, int k,
                            oracle::Client& client, const dsl::ExecutionLimits& limits) {
  if (first.value.is_concrete()) return first;

  auto queries = collect_queries(first.programs);
  if (queries.empty()) {
    first.rag_skipped_no_queries = true;
    return first;
  }

  std::string paragraphs;
  for (const auto& query : queries) {
    oracle::Sampling sampling;
    sampling.max_tokens = 512;  // "short paragraph" answers stay bounded
    auto transcript =
        oracle::render_template(oracle::TaskId::RagAnswer, {{"q", query}}, sampling);
    std::string paragraph = trim_copy(client.complete_one(std::move(transcript)));
    if (paragraph.empty()) continue;
    if (!paragraphs.empty()) paragraphs += "\n";
    paragraphs += paragraph;
  }
  if (paragraphs.empty()) {
    first.rag_skipped_no_queries = true;
    return first;
  }

  oracle::Sampling sampling;
  sampling.temperature = 0.7;
  sampling.n = k;
  auto transcript = oracle::render_template(oracle::TaskId::Qc2P,
                                            {{"q", q.text}, {"cot", paragraphs}}, sampling);
  auto completions = client.complete(transcript);
  std::vector<VotedProgram> programs;
  programs.reserve(completions.size());
  for (const auto& c : completions) programs.push_back(run_sample(c, q, client, limits));
  return vote_programs(std::move(programs), VotedAnswer::Pass::Rag);
}

dsl::ProgramAst conceptual_answer(const conceptualize::AbstractQuestion& aq, int k,
                                  oracle::Client& client) {
  oracle::Sampling sampling;
  sampling.temperature = 0.7;
  sampling.n = k;
  auto transcript = oracle::render_template(oracle::TaskId::Aq2P,
                                            {{"aq", aq.text_with_placeholders}}, sampling);
  auto completions = client.complete(transcript);
  for (const auto& completion : completions) {
    auto split = dsl::split_program_completion(completion);
    try {
      auto program = dsl::parse_program(split.source);
      if (dsl::validate_program(program).unused_params.empty()) return program;
    } catch (const dsl::ParseError&) {
    }
  }
  throw std::runtime_error("no sampled abstract program parsed cleanly");
}

std::vector<VotedProgram> no_repeat_filter(std::vector<VotedProgram> programs,
                                           const std::string& original, double cutoff,
                                           oracle::SimilarityBackend& similarity) {
  if (!(cutoff > 0.0 && cutoff <= 1.0))
    throw std::invalid_argument("no-repeat cutoff must lie in (0, 1]");
  std::vector<VotedProgram> kept;
  for (auto& p : programs) {
    bool repeats = false;
    for (const auto& t : p.outcome.oracle_trace) {
      auto score = similarity.score(t.query, original);
      if (score && *score >= cutoff) {
        repeats = true;
        break;
      }
    }
    if (!repeats && p.program) {
      for (const auto& q : dsl::static_oracle_queries(*p.program)) {
        auto score = similarity.score(q, original);
        if (score && *score >= cutoff) {
          repeats = true;
          break;
        }
      }
    }
    if (!repeats) kept.push_back(std::move(p));
  }
  return kept;
}

}  // namespace analog::infer
