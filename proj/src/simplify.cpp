#include "analog/simplify.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "analog/completion.hpp"
#include "analog/parser.hpp"
#include "analog/pool.hpp"
#include "analog/templates.hpp"
#include "analog/validate.hpp"

namespace analog::simplify {

using data::QuestionRecord;
using data::SupervisionInstance;
using nlohmann::json;

std::string KnownConditions::joined() const {
  std::string out;
  for (const auto& s : statements) {
    if (!out.empty()) out += " ";
    out += s.statement;
  }
  return out;
}

int SimplificationJournal::consensus_iteration() const {
  if (status != Status::Consensus) return -1;
  return iterations.empty() ? -1 : iterations.back().iteration;
}

std::string status_name(SimplificationJournal::Status s) {
  switch (s) {
    case SimplificationJournal::Status::Consensus: return "consensus";
    case SimplificationJournal::Status::TerminalNoConsensus: return "terminal_no_consensus";
    case SimplificationJournal::Status::BudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

json SimplificationJournal::to_json() const {
  json iters = json::array();
  for (const auto& it : iterations) {
    json entry = {{"iteration", it.iteration},
                  {"terminal", it.terminal},
                  {"unanimous", it.unanimous},
                  {"outcome_count", it.outcomes.size()}};
    if (it.next_question) entry["next_question"] = *it.next_question;
    if (it.answer_display) entry["answer"] = *it.answer_display;
    if (it.folded_statement) entry["folded_statement"] = *it.folded_statement;
    if (it.consensus) entry["consensus"] = it.consensus->repr();
    int errors = 0, unknowns = 0;
    for (const auto& o : it.outcomes) {
      errors += o.status == dsl::ExecStatus::Error;
      unknowns += o.status == dsl::ExecStatus::Unknown;
    }
    entry["errors"] = errors;
    entry["unknowns"] = unknowns;
    iters.push_back(std::move(entry));
  }
  json out = {{"question_id", question_id},
              {"status", status_name(status)},
              {"iterations", std::move(iters)},
              {"instances_emitted", instances.size()}};
  if (!note.empty()) out["note"] = note;
  return out;
}

KnownConditions initial_conditions(const QuestionRecord& q, oracle::Client& client) {
  auto transcript = oracle::render_template(oracle::TaskId::MathQ2Kc, {{"q", q.text}});
  std::string completion = client.complete_one(std::move(transcript));
  KnownConditions kc;
  std::istringstream in(completion);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim_copy(line);
    if (!t.empty()) kc.statements.push_back({t, -1});
  }
  return kc;
}

NextQuestion next_question(const QuestionRecord& q, const KnownConditions& kc,
                           oracle::Client& client) {
  auto transcript =
      oracle::render_template(oracle::TaskId::MathQ2Nq, {{"q", q.text}, {"c", kc.joined()}});
  std::string completion = trim_copy(client.complete_one(std::move(transcript)));
  NextQuestion nq;
  if (completion.empty()) {
    nq.terminal = true;
    nq.note = "empty decomposition output";
    return nq;
  }
  if (lower_copy(completion).find("no more decomposition") != std::string::npos) {
    nq.terminal = true;
    return nq;
  }
  nq.text = completion;
  return nq;
}

bool answer_and_fold(KnownConditions& kc, const std::string& nq, int iteration,
                     oracle::Client& client, IterationRecord& record) {
  std::string combined = kc.joined() + " " + nq;
  auto cot_t = oracle::render_template(oracle::TaskId::Cot, {{"q", combined}});
  std::string cot = client.complete_one(std::move(cot_t));
  auto answer = oracle::extract_final_answer(cot, oracle::ExpectedAnswer::Numeric);
  if (!answer.is_concrete()) return false;
  record.answer_display = answer.display();

  auto fold_t =
      oracle::render_template(oracle::TaskId::Qa2S, {{"q", nq}, {"a", answer.display()}});
  std::string statement = trim_copy(client.complete_one(std::move(fold_t)));
  if (statement.empty()) return false;
  record.folded_statement = statement;
  kc.statements.push_back({statement, iteration});
  return true;
}

ConsensusResult propose_and_check(const QuestionRecord& q, const KnownConditions& kc,
                                  int sample_count, int quota, oracle::Client& client,
                                  const dsl::ExecutionLimits& limits) {
  oracle::Sampling sampling;
  sampling.temperature = 0.7;
  sampling.n = sample_count;
  auto transcript = oracle::render_template(oracle::TaskId::Qc2P,
                                            {{"q", q.text}, {"cot", kc.joined()}}, sampling);
  auto completions = client.complete(transcript);

  ConsensusResult result;
  struct Cluster {
    Value value;
    int count = 0;
    std::vector<std::string> sources;
  };
  std::vector<Cluster> clusters;

  for (const auto& completion : completions) {
    auto split = dsl::split_program_completion(completion);
    dsl::ExecutionOutcome outcome;
    std::optional<dsl::ProgramAst> program;
    try {
      program = dsl::parse_program(split.source);
    } catch (const dsl::ParseError& e) {
      // invalid programs form their own cluster so the quota arithmetic
      // stays total; they can never carry a consensus value
      ++result.invalid_count;
      outcome.status = dsl::ExecStatus::Error;
      outcome.error_message = e.what();
      result.outcomes.push_back(std::move(outcome));
      continue;
    }

    dsl::ParameterBinding binding;
    bool bound = true;
    const auto source_binding = split.binding ? split.binding : q.binding;
    for (const auto& p : program->entry_params()) {
      if (!source_binding || !source_binding->count(p.name)) {
        bound = false;
        break;
      }
      binding.emplace(p.name, source_binding->at(p.name));
    }
    if (!bound) {
      outcome.status = dsl::ExecStatus::Error;
      outcome.error_message = "binding failure";
      result.outcomes.push_back(std::move(outcome));
      continue;
    }

    outcome = dsl::execute_program(*program, binding, client, limits);
    if (outcome.status == dsl::ExecStatus::Value) {
      bool placed = false;
      for (auto& c : clusters) {
        if (soft_equal(c.value, *outcome.value)) {
          ++c.count;
          c.sources.push_back(dsl::print_program(*program));
          placed = true;
          break;
        }
      }
      if (!placed) clusters.push_back({*outcome.value, 1, {dsl::print_program(*program)}});
    }
    result.outcomes.push_back(std::move(outcome));
  }

  const Cluster* best = nullptr;
  for (const auto& c : clusters)
    if (!best || c.count > best->count) best = &c;
  if (best && best->count >= quota) {
    result.value = best->value;
    result.consensus_sources = best->sources;
    result.unanimous = best->count == sample_count;
  }
  return result;
}

namespace {

void record_check(const QuestionRecord& q, const KnownConditions& kc,
                  const ConsensusResult& check, IterationRecord& record,
                  SimplificationJournal& journal) {
  record.outcomes = check.outcomes;
  record.consensus = check.value;
  record.unanimous = check.unanimous;
  if (!check.value) return;
  journal.status = SimplificationJournal::Status::Consensus;
  for (const auto& source : check.consensus_sources) {
    SupervisionInstance inst;
    inst.task = oracle::TaskId::Qc2P;
    inst.origin = SupervisionInstance::Origin::Simplification;
    inst.origin_question_id = q.id;
    inst.provenance = "iteration " + std::to_string(record.iteration);
    inst.input_text =
        oracle::render_template(oracle::TaskId::Qc2P, {{"q", q.text}, {"cot", kc.joined()}})
            .messages.front()
            .content;
    inst.target_text = source;
    journal.instances.push_back(std::move(inst));
  }
}

}  // namespace

SimplificationJournal run_simplification(const QuestionRecord& q, const SimplifyOptions& options,
                                         oracle::Client& client) {
  SimplificationJournal journal;
  journal.question_id = q.id;
  journal.status = SimplificationJournal::Status::BudgetExhausted;

  try {
    KnownConditions kc = initial_conditions(q, client);
    if (kc.empty()) {
      journal.status = SimplificationJournal::Status::TerminalNoConsensus;
      journal.note = "no initial conditions extracted; question skipped";
      return journal;
    }

    {
      IterationRecord record;
      record.iteration = 0;
      auto check =
          propose_and_check(q, kc, options.sample_count, options.quota, client, options.limits);
      record_check(q, kc, check, record, journal);
      journal.iterations.push_back(std::move(record));
      if (journal.status == SimplificationJournal::Status::Consensus) return journal;
    }

    for (int i = 1; i <= options.max_iters; ++i) {
      IterationRecord record;
      record.iteration = i;
      NextQuestion nq = next_question(q, kc, client);
      if (nq.terminal) {
        record.terminal = true;
        journal.status = SimplificationJournal::Status::TerminalNoConsensus;
        if (!nq.note.empty()) journal.note = nq.note;
        journal.iterations.push_back(std::move(record));
        return journal;
      }
      record.next_question = nq.text;
      if (!answer_and_fold(kc, nq.text, i, client, record)) {
        journal.status = SimplificationJournal::Status::TerminalNoConsensus;
        journal.note = "no numeric answer extracted for the decomposed question";
        journal.iterations.push_back(std::move(record));
        return journal;
      }
      auto check =
          propose_and_check(q, kc, options.sample_count, options.quota, client, options.limits);
      record_check(q, kc, check, record, journal);
      journal.iterations.push_back(std::move(record));
      if (journal.status == SimplificationJournal::Status::Consensus) return journal;
    }
  } catch (const std::exception& e) {
    journal.status = SimplificationJournal::Status::BudgetExhausted;
    journal.note = std::string("oracle failure: ") + e.what();
    return journal;
  }
  journal.note = "iteration budget exhausted without consensus";
  return journal;
}

std::vector<SimplificationJournal> run_simplification_all(
    const std::vector<QuestionRecord>& questions, const SimplifyOptions& options,
    oracle::Client& client) {
  data::ExtractionScope scope;  // simplification is extraction: gold stays sealed
  std::vector<SimplificationJournal> journals(questions.size());
  parallel_for(questions.size(), options.threads,
               [&](std::size_t i) { journals[i] = run_simplification(questions[i], options, client); });
  return journals;
}

IterationStats collect_stats(const std::vector<SimplificationJournal>& journals,
                             const std::map<std::string, double>& gold) {
  IterationStats stats;
  stats.total_journals = static_cast<int>(journals.size());

  int max_iter = -1;
  for (const auto& j : journals) max_iter = std::max(max_iter, j.consensus_iteration());
  if (max_iter < 0) return stats;

  std::vector<int> gained(static_cast<std::size_t>(max_iter) + 1, 0);
  std::vector<int> correct(gained.size(), 0);
  std::vector<int> graded(gained.size(), 0);
  for (const auto& j : journals) {
    int it = j.consensus_iteration();
    if (it < 0) continue;
    ++gained[static_cast<std::size_t>(it)];
    auto g = gold.find(j.question_id);
    if (g != gold.end() && j.iterations.back().consensus) {
      ++graded[static_cast<std::size_t>(it)];
      if (soft_equal(Value::decimal(g->second),
                     Value::decimal(j.iterations.back().consensus->as_number())))
        ++correct[static_cast<std::size_t>(it)];
    }
  }

  int cumulative = 0;
  for (std::size_t i = 0; i < gained.size(); ++i) {
    cumulative += gained[i];
    IterationStats::Row row;
    row.iteration = static_cast<int>(i);
    row.instances_gained = gained[i];
    row.collected_pct =
        stats.total_journals == 0 ? 0.0 : 100.0 * cumulative / stats.total_journals;
    if (graded[i] > 0) row.accuracy_vs_gold = 100.0 * correct[i] / graded[i];
    stats.rows.push_back(row);
  }
  return stats;
}

std::string IterationStats::render_table() const {
  std::ostringstream out;
  out << std::left << std::setw(11) << "iteration" << std::right << std::setw(9) << "gained"
      << std::setw(12) << "accuracy" << std::setw(15) << "collected_pct" << "\n";
  for (const auto& row : rows) {
    out << std::left << std::setw(11) << row.iteration << std::right << std::setw(9)
        << row.instances_gained;
    if (row.accuracy_vs_gold)
      out << std::setw(11) << std::fixed << std::setprecision(1) << *row.accuracy_vs_gold << "%";
    else
      out << std::setw(12) << "-";
    out << std::setw(14) << std::fixed << std::setprecision(1) << row.collected_pct << "%\n";
  }
  out << "total questions: " << total_journals << "\n";
  return out.str();
}

json IterationStats::to_json() const {
  json rows_json = json::array();
  for (const auto& row : rows) {
    json entry = {{"iteration", row.iteration},
                  {"instances_gained", row.instances_gained},
                  {"collected_pct", row.collected_pct}};
    if (row.accuracy_vs_gold) entry["accuracy_vs_gold"] = *row.accuracy_vs_gold;
    rows_json.push_back(std::move(entry));
  }
  return {{"total_journals", total_journals}, {"rows", std::move(rows_json)}};
}

}  // namespace analog::simplify
