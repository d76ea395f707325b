#include "analog/conceptualize.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "analog/parser.hpp"
#include "analog/pool.hpp"

namespace analog::conceptualize {

using data::QuestionRecord;
using data::SupervisionInstance;
using nlohmann::json;
using oracle::Answer;
using oracle::AnswerKind;

int SimilarQuestionSet::silver_count() const {
  int m = 0;
  for (const auto& s : similars) m += s.silver && s.silver->is_concrete();
  return m;
}

int CandidateProgram::match_count() const {
  int n = 0;
  for (const auto& r : per_question_results) n += r.matches_silver;
  return n;
}

int CandidateProgram::error_count() const {
  int n = 0;
  for (const auto& r : per_question_results) n += r.outcome.status == dsl::ExecStatus::Error;
  return n;
}

std::vector<std::string> CandidateProgram::all_queries() const {
  std::vector<std::string> queries;
  std::set<std::string> seen;
  auto add = [&](const std::string& q) {
    if (seen.insert(q).second) queries.push_back(q);
  };
  for (const auto& r : per_question_results)
    for (const auto& t : r.outcome.oracle_trace) add(t.query);
  if (program)
    for (const auto& q : dsl::static_oracle_queries(*program)) add(q);
  return queries;
}

double high_threshold(int m, const SelectionConfig& cfg) {
  return std::max(static_cast<double>(cfg.high_threshold_floor), cfg.high_threshold_frac * m);
}

// ---- abstraction ----

AbstractQuestion parse_abstraction(const std::string& completion,
                                   const std::string& source_question_id) {
  AbstractQuestion aq;
  aq.source_question_id = source_question_id;

  static const std::string kBecomes = "the question becomes";
  std::string text = completion;
  auto pos = lower_copy(text).find(kBecomes);
  if (pos != std::string::npos) text = text.substr(pos + kBecomes.size());
  static const std::string kClause = "With parameters";
  auto clause = text.find(kClause);
  if (clause != std::string::npos) text = text.substr(0, clause);
  aq.text_with_placeholders = trim_copy(text);
  if (aq.text_with_placeholders.empty())
    throw ExtractError("abstraction output has no question text");

  aq.source_binding = dsl::parse_binding_clause(completion);
  if (aq.source_binding) {
    for (const auto& [name, value] : *aq.source_binding)
      aq.parameters.emplace_back(name, value.kind());
  }
  return aq;
}

AbstractQuestion abstract_question(const QuestionRecord& q, oracle::Client& client) {
  auto transcript = oracle::render_template(oracle::TaskId::Abs, {{"q", q.text}});
  std::string completion = client.complete_one(std::move(transcript));
  AbstractQuestion aq = parse_abstraction(completion, q.id);
  if (q.is_math() && aq.parameters.empty())
    throw ExtractError("math abstraction carries no parameters");
  return aq;
}

// ---- similar question generation ----

namespace {

std::string strip_bullet(const std::string& line) {
  std::string t = trim_copy(line);
  std::size_t i = 0;
  while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
  if (i > 0 && i < t.size() && (t[i] == '.' || t[i] == ')')) return trim_copy(t.substr(i + 1));
  if (!t.empty() && (t[0] == '-' || t[0] == '*')) return trim_copy(t.substr(1));
  return t;
}

}  // namespace

std::vector<QuestionRecord> generate_similars(const AbstractQuestion& aq, int n,
                                              oracle::Client& client) {
  auto transcript =
      oracle::render_template(oracle::TaskId::Sim, {{"aq", aq.text_with_placeholders}});
  std::string completion = client.complete_one(std::move(transcript));

  std::vector<QuestionRecord> out;
  std::set<std::string> seen_texts;
  std::istringstream in(completion);
  std::string line;
  int index = 0;
  while (std::getline(in, line) && static_cast<int>(out.size()) < n) {
    std::string entry = strip_bullet(line);
    if (entry.empty()) continue;
    QuestionRecord record;
    static const std::string kClause = "With parameters";
    auto clause = entry.find(kClause);
    if (clause != std::string::npos) {
      record.binding = dsl::parse_binding_clause(entry);
      entry = trim_copy(entry.substr(0, clause));
    }
    if (entry.empty() || !seen_texts.insert(entry).second) continue;
    std::ostringstream id;
    id << aq.source_question_id << "::sim" << (index < 10 ? "0" : "") << index;
    ++index;
    record.id = id.str();
    record.text = entry;
    out.push_back(std::move(record));
  }
  return out;
}

// ---- confidence gate ----

std::optional<Answer> gate_decision(const std::vector<Answer>& answers, int x) {
  std::vector<std::pair<Answer, int>> clusters;
  for (const auto& a : answers) {
    if (!a.is_concrete()) continue;  // unknown never counts toward a silver label
    bool placed = false;
    for (auto& [rep, count] : clusters) {
      if (rep.agrees_with(a)) {
        ++count;
        placed = true;
        break;
      }
    }
    if (!placed) clusters.emplace_back(a, 1);
  }
  const std::pair<Answer, int>* best = nullptr;
  bool tie = false;
  for (const auto& c : clusters) {
    if (!best || c.second > best->second) {
      best = &c;
      tie = false;
    } else if (c.second == best->second) {
      tie = true;
    }
  }
  if (!best || tie || best->second < x) return std::nullopt;
  return best->first;
}

std::optional<std::pair<Answer, std::string>> confidence_gate(const QuestionRecord& q, int k,
                                                              int x, oracle::Client& client) {
  oracle::Sampling sampling;
  sampling.temperature = 0.7;
  sampling.n = k;
  auto transcript = oracle::render_template(oracle::TaskId::Cot, {{"q", q.text}}, sampling);
  auto cots = client.complete(transcript);

  std::vector<Answer> answers;
  answers.reserve(cots.size());
  for (const auto& cot : cots) answers.push_back(oracle::extract_final_answer(cot, q.expected_answer()));

  auto silver = gate_decision(answers, x);
  if (!silver) return std::nullopt;
  for (std::size_t i = 0; i < answers.size(); ++i)
    if (answers[i].agrees_with(*silver)) return std::make_pair(*silver, cots[i]);
  return std::nullopt;  // unreachable: the modal answer came from some CoT
}

// ---- candidate generation and execution ----

CandidateProgram generate_candidate(const QuestionRecord& q, const std::string& cot,
                                    oracle::Client& client) {
  auto transcript =
      oracle::render_template(oracle::TaskId::Qc2P, {{"q", q.text}, {"cot", cot}});
  std::string completion = client.complete_one(std::move(transcript));

  CandidateProgram candidate;
  candidate.origin_question_id = q.id;
  auto split = dsl::split_program_completion(completion);
  candidate.raw_source = split.source;
  candidate.own_binding = split.binding ? split.binding : q.binding;
  try {
    candidate.program = dsl::parse_program(split.source);
    candidate.validation = dsl::validate_program(*candidate.program);
  } catch (const dsl::ParseError& e) {
    candidate.parse_error = e.what();
    candidate.validation.parse_ok = false;
    candidate.validation.issues.push_back(e.what());
  }
  return candidate;
}

namespace {

std::optional<dsl::ParameterBinding> project_binding(const dsl::ProgramAst& program,
                                                     const dsl::ParameterBinding& source) {
  dsl::ParameterBinding projected;
  for (const auto& p : program.entry_params()) {
    auto it = source.find(p.name);
    if (it == source.end()) return std::nullopt;
    projected.emplace(p.name, it->second);
  }
  return projected;
}

bool answer_matches_value(const Answer& silver, const Value& value) {
  switch (silver.kind) {
    case AnswerKind::Yes:
      return value.is_boolean() && value.as_boolean();
    case AnswerKind::No:
      return value.is_boolean() && !value.as_boolean();
    case AnswerKind::Number:
      return value.is_number() &&
             soft_equal(Value::decimal(silver.number_value), Value::decimal(value.as_number()));
    case AnswerKind::Unknown:
      return false;
  }
  return false;
}

std::string value_literal(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Boolean:
      return v.as_boolean() ? "True" : "False";
    case ValueKind::Integer:
      return v.repr();
    case ValueKind::Decimal: {
      std::string r = v.repr();
      if (r.find('.') == std::string::npos && r.find('e') == std::string::npos) r += ".0";
      return r;
    }
    case ValueKind::Text: {
      std::string out = "\"";
      for (char c : v.as_text()) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
      }
      out += "\"";
      return out;
    }
  }
  return "";
}

std::string render_answer_call(const dsl::ProgramAst& program,
                               const dsl::ParameterBinding& binding) {
  std::ostringstream out;
  out << "answer(";
  bool first = true;
  for (const auto& p : program.entry_params()) {
    if (!first) out << ", ";
    first = false;
    out << value_literal(binding.at(p.name));
  }
  out << ")";
  return out.str();
}

}  // namespace

std::optional<dsl::ParameterBinding> bind_for_question(const dsl::ProgramAst& program,
                                                       const QuestionRecord& q,
                                                       oracle::Client& client) {
  if (q.binding) {
    if (auto projected = project_binding(program, *q.binding)) return projected;
  }
  // auxiliary binding query: q2p also emits parameter values
  try {
    auto transcript = oracle::render_template(oracle::TaskId::Q2P, {{"q", q.text}});
    std::string completion = client.complete_one(std::move(transcript));
    if (auto binding = dsl::parse_binding_clause(completion))
      return project_binding(program, *binding);
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

void execute_candidates(std::vector<CandidateProgram>& candidates, const SimilarQuestionSet& set,
                        oracle::Client& client, const dsl::ExecutionLimits& limits) {
  for (auto& candidate : candidates) {
    candidate.per_question_results.clear();
    if (!candidate.valid()) continue;
    for (const auto& similar : set.similars) {
      if (!similar.silver || !similar.silver->is_concrete()) continue;
      PerQuestionResult result;
      result.question_id = similar.record.id;

      std::optional<dsl::ParameterBinding> binding;
      if (similar.record.id == candidate.origin_question_id && candidate.own_binding)
        binding = project_binding(*candidate.program, *candidate.own_binding);
      if (!binding) binding = bind_for_question(*candidate.program, similar.record, client);

      if (!binding) {
        result.outcome.status = dsl::ExecStatus::Error;
        result.outcome.error_message = "binding failure";
      } else {
        result.binding_used = binding;
        result.outcome = dsl::execute_program(*candidate.program, *binding, client, limits);
        if (result.outcome.status == dsl::ExecStatus::Value)
          result.matches_silver = answer_matches_value(*similar.silver, *result.outcome.value);
      }
      candidate.per_question_results.push_back(std::move(result));
    }
  }
}

// ---- selection ----

bool passes_criterion(const CandidateProgram& candidate, DropCriterion criterion,
                      const SelectionConfig& cfg, const std::string& original_question,
                      oracle::SimilarityBackend& similarity) {
  switch (criterion) {
    case DropCriterion::Similarity:
      for (const auto& query : candidate.all_queries()) {
        auto score = similarity.score(query, original_question);
        if (score && *score >= cfg.sim_cutoff) return false;
      }
      return true;
    case DropCriterion::Complexity:
      return candidate.validation.oracle_call_count >= cfg.min_oracle_calls;
    case DropCriterion::Soundness:
      if (!candidate.valid()) return false;
      if (!candidate.validation.unused_params.empty()) return false;
      return candidate.error_count() <= cfg.max_error_questions;
  }
  return false;
}

SelectionResult apply_selection(const std::vector<CandidateProgram>& candidates,
                                const SimilarQuestionSet& set, const SelectionConfig& cfg,
                                oracle::SimilarityBackend& similarity,
                                const std::string& original_question,
                                const std::vector<DropCriterion>& order) {
  SelectionResult result;
  result.m = set.silver_count();
  result.drop_reasons.assign(candidates.size(), "");
  if (result.m == 0) {
    for (auto& reason : result.drop_reasons) reason = "no silver-bearing similar questions";
    return result;
  }
  const double high = high_threshold(result.m, cfg);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& candidate = candidates[i];
    for (DropCriterion criterion : order) {
      if (!passes_criterion(candidate, criterion, cfg, original_question, similarity)) {
        result.drop_reasons[i] = criterion == DropCriterion::Similarity ? "similarity"
                                 : criterion == DropCriterion::Complexity ? "complexity"
                                                                          : "soundness";
        break;
      }
    }
    if (!result.drop_reasons[i].empty()) continue;
    int matches = candidate.match_count();
    if (matches >= cfg.low_threshold) result.low_pass.push_back(i);
    if (static_cast<double>(matches) >= high) result.high_pass.push_back(i);
  }
  return result;
}

std::string strip_answer_call(const dsl::ProgramAst& program) {
  return dsl::print_definitions(program);
}

std::vector<SupervisionInstance> formulate_instances(const SelectionResult& selection,
                                                     const std::vector<CandidateProgram>& candidates,
                                                     const SimilarQuestionSet& set) {
  std::vector<SupervisionInstance> instances;
  std::map<std::string, const SimilarQuestion*> by_id;
  for (const auto& s : set.similars) by_id[s.record.id] = &s;

  for (std::size_t idx : selection.low_pass) {
    const auto& candidate = candidates[idx];
    for (const auto& result : candidate.per_question_results) {
      if (!result.matches_silver || !result.binding_used) continue;
      const SimilarQuestion* similar = by_id.at(result.question_id);
      SupervisionInstance inst;
      inst.task = oracle::TaskId::Q2P;
      inst.origin = SupervisionInstance::Origin::ConceptQ2P;
      inst.origin_question_id = set.abstract.source_question_id;
      inst.provenance = result.question_id;
      inst.input_text =
          oracle::render_template(oracle::TaskId::Q2P, {{"q", similar->record.text}})
              .messages.front()
              .content;
      inst.target_text = strip_answer_call(*candidate.program) + "\n" +
                         render_answer_call(*candidate.program, *result.binding_used) + "\n";
      // emission-time well-formedness check
      try {
        dsl::parse_program(inst.target_text);
      } catch (const dsl::ParseError&) {
        continue;
      }
      instances.push_back(std::move(inst));
    }
  }
  for (std::size_t idx : selection.high_pass) {
    const auto& candidate = candidates[idx];
    SupervisionInstance inst;
    inst.task = oracle::TaskId::Aq2P;
    inst.origin = SupervisionInstance::Origin::ConceptAq2P;
    inst.origin_question_id = set.abstract.source_question_id;
    inst.provenance = candidate.origin_question_id;
    inst.input_text = oracle::render_template(oracle::TaskId::Aq2P,
                                              {{"aq", set.abstract.text_with_placeholders}})
                          .messages.front()
                          .content;
    inst.target_text = strip_answer_call(*candidate.program);
    instances.push_back(std::move(inst));
  }
  return instances;
}

// ---- orchestration ----

namespace {

struct QuestionOutput {
  std::vector<SupervisionInstance> instances;
  json journal;
};

json candidate_journal(const CandidateProgram& c, const std::string& drop_reason, bool high,
                       bool low) {
  json per_question = json::array();
  for (const auto& r : c.per_question_results) {
    per_question.push_back({{"question_id", r.question_id},
                            {"status", r.outcome.status == dsl::ExecStatus::Value    ? "value"
                                       : r.outcome.status == dsl::ExecStatus::Unknown ? "unknown"
                                                                                      : "error"},
                            {"matches_silver", r.matches_silver}});
  }
  return {{"origin_question_id", c.origin_question_id},
          {"valid", c.valid()},
          {"parse_error", c.parse_error},
          {"oracle_call_count", c.validation.oracle_call_count},
          {"unused_params", c.validation.unused_params},
          {"match_count", c.match_count()},
          {"error_count", c.error_count()},
          {"per_question", per_question},
          {"drop_reason", drop_reason},
          {"tier", high ? "high" : low ? "low" : "none"}};
}

QuestionOutput process_question(const QuestionRecord& q, const ConceptOptions& options,
                                oracle::Client& client, oracle::SimilarityBackend& similarity) {
  QuestionOutput output;
  json& journal = output.journal;
  journal["question_id"] = q.id;
  journal["status"] = "ok";

  SimilarQuestionSet set;
  try {
    set.abstract = abstract_question(q, client);
  } catch (const std::exception& e) {
    journal["status"] = "skipped";
    journal["reason"] = std::string("abstraction failed: ") + e.what();
    return output;
  }
  journal["abstract_question"] = set.abstract.text_with_placeholders;

  auto similar_records = generate_similars(set.abstract, options.selection.n, client);
  for (auto& record : similar_records) {
    record.dataset = q.dataset;
    record.split = data::Split::Train;
  }
  if (similar_records.size() < 2) {
    journal["status"] = "skipped";
    journal["reason"] = "fewer than 2 usable similar questions";
    return output;
  }

  json similar_journal = json::array();
  for (auto& record : similar_records) {
    SimilarQuestion similar;
    auto gate = confidence_gate(record, options.selection.k, options.selection.x, client);
    json entry = {{"id", record.id}, {"text", record.text}, {"gated", gate.has_value()}};
    if (gate) {
      similar.silver = gate->first;
      similar.chosen_cot = gate->second;
      entry["silver"] = gate->first.display();
    }
    similar.record = std::move(record);
    set.similars.push_back(std::move(similar));
    similar_journal.push_back(std::move(entry));
  }
  journal["similars"] = std::move(similar_journal);
  journal["m"] = set.silver_count();

  std::vector<CandidateProgram> candidates;
  for (const auto& similar : set.similars) {
    if (!similar.silver || !similar.chosen_cot) continue;
    candidates.push_back(generate_candidate(similar.record, *similar.chosen_cot, client));
  }
  execute_candidates(candidates, set, client, options.limits);

  auto selection = apply_selection(candidates, set, options.selection, similarity, q.text);
  json candidate_entries = json::array();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool high = std::find(selection.high_pass.begin(), selection.high_pass.end(), i) !=
                selection.high_pass.end();
    bool low = std::find(selection.low_pass.begin(), selection.low_pass.end(), i) !=
               selection.low_pass.end();
    candidate_entries.push_back(candidate_journal(candidates[i], selection.drop_reasons[i], high, low));
  }
  journal["candidates"] = std::move(candidate_entries);
  journal["high_threshold"] = high_threshold(selection.m, options.selection);
  journal["low_threshold"] = options.selection.low_threshold;

  output.instances = formulate_instances(selection, candidates, set);
  journal["instances_emitted"] = output.instances.size();
  return output;
}

}  // namespace

ConceptResult run_conceptualization(const std::vector<QuestionRecord>& questions,
                                    const ConceptOptions& options, oracle::Client& client,
                                    oracle::SimilarityBackend& similarity) {
  data::ExtractionScope scope;  // the whole pipeline is gold-blind
  std::vector<QuestionOutput> outputs(questions.size());
  parallel_for(questions.size(), options.threads, [&](std::size_t i) {
    try {
      outputs[i] = process_question(questions[i], options, client, similarity);
    } catch (const std::exception& e) {
      outputs[i].instances.clear();
      outputs[i].journal = {{"question_id", questions[i].id},
                            {"status", "error"},
                            {"reason", e.what()}};
    }
  });

  ConceptResult result;
  for (auto& output : outputs) {
    for (auto& inst : output.instances) result.instances.push_back(std::move(inst));
    result.journal.push_back(std::move(output.journal));
  }
  return result;
}

}  // namespace analog::conceptualize
