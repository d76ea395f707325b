// End-to-end acceptance suite. Each criterion is exercised independently and
// reported as exactly one pass/fail line; the process exits non-zero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "analog/conceptualize.hpp"
#include "analog/infer.hpp"
#include "analog/parser.hpp"
#include "analog/simplify.hpp"
#include "analog/validate.hpp"

using namespace analog;
using data::QuestionRecord;
using oracle::Answer;
using oracle::ScriptedBackend;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& what) {
  if (!condition) throw CheckFailure(what);
}

oracle::Client client_for(std::vector<ScriptedBackend::Rule> rules) {
  return oracle::Client(std::make_shared<ScriptedBackend>(std::move(rules)));
}

oracle::Client silent_client() {
  return oracle::Client(std::make_shared<oracle::LambdaBackend>(
      [](const oracle::Transcript&) -> std::vector<std::string> {
        throw CheckFailure("unexpected oracle call");
      }));
}

// ---- criterion 1: the interpreter solves the worked reference programs ----

void criterion_interpreter() {
  const auto start = std::chrono::steady_clock::now();
  auto client = silent_client();

  auto run = [&](const std::string& source, const dsl::ParameterBinding& binding) {
    auto ast = dsl::parse_program(source);
    auto outcome = dsl::execute_program(ast, binding, client);
    require(outcome.status == dsl::ExecStatus::Value, "program did not produce a value");
    return outcome.value->as_number();
  };

  const std::string candy_bar =
      "def answer(num_soft_drinks_x: int, cost_per_soft_drink_y: int, num_candy_bars_z: int, "
      "total_spent_w: int) -> float:\n"
      "    total_cost_soft_drinks = num_soft_drinks_x * cost_per_soft_drink_y\n"
      "    total_cost_candy_bars = total_spent_w - total_cost_soft_drinks\n"
      "    return total_cost_candy_bars / num_candy_bars_z\n";
  double candy = run(candy_bar, {{"num_soft_drinks_x", Value::integer(2)},
                                 {"cost_per_soft_drink_y", Value::integer(4)},
                                 {"num_candy_bars_z", Value::integer(5)},
                                 {"total_spent_w", Value::integer(28)}});
  require(std::fabs(candy - 4.0) < 1e-9, "candy-bar program returned " + std::to_string(candy));

  const std::string lions =
      "def answer(born_per_month: int, die_per_month: int, num_months: int, final_count: int) "
      "-> int:\n"
      "    net_increase = born_per_month - die_per_month\n"
      "    return final_count - net_increase * num_months\n";
  double lion = run(lions, {{"born_per_month", Value::integer(5)},
                            {"die_per_month", Value::integer(1)},
                            {"num_months", Value::integer(12)},
                            {"final_count", Value::integer(148)}});
  require(std::fabs(lion - 100.0) < 1e-9, "lion program returned " + std::to_string(lion));

  const std::string books =
      "def answer(num_inches_x: int, num_pages_y: int, num_inches_z: int, num_w: int) -> "
      "float:\n"
      "    pages_per_inch = num_pages_y / num_inches_z\n"
      "    total_pages = num_inches_x * pages_per_inch\n"
      "    return total_pages / num_w\n";
  double pages = run(books, {{"num_inches_x", Value::integer(12)},
                             {"num_pages_y", Value::integer(80)},
                             {"num_inches_z", Value::integer(1)},
                             {"num_w", Value::integer(6)}});
  require(std::fabs(pages - 160.0) < 1e-9, "book-stack program returned " + std::to_string(pages));

  const auto elapsed = std::chrono::steady_clock::now() - start;
  require(elapsed < std::chrono::seconds(1), "interpreter suite exceeded the 1s budget");
}

// ---- shared helpers for the selection criteria ----

const std::string kSoundSource =
    "def answer(a: str, b: str) -> bool:\n"
    "    x = ask_llm(\"trait of \" + a + \"?\", float)\n"
    "    y = ask_llm(\"trait of \" + b + \"?\", float)\n"
    "    return x > y\n";

conceptualize::CandidateProgram make_candidate(const std::string& source, int matches,
                                               int errors) {
  conceptualize::CandidateProgram c;
  c.origin_question_id = "s0";
  c.raw_source = source;
  try {
    c.program = dsl::parse_program(source);
    c.validation = dsl::validate_program(*c.program);
  } catch (const dsl::ParseError& e) {
    c.parse_error = e.what();
    c.validation.parse_ok = false;
  }
  int id = 0;
  for (int i = 0; i < matches; ++i) {
    conceptualize::PerQuestionResult r;
    r.question_id = "s" + std::to_string(id++);
    r.outcome.status = dsl::ExecStatus::Value;
    r.outcome.value = Value::boolean(true);
    r.matches_silver = true;
    c.per_question_results.push_back(std::move(r));
  }
  for (int i = 0; i < errors; ++i) {
    conceptualize::PerQuestionResult r;
    r.question_id = "s" + std::to_string(id++);
    r.outcome.status = dsl::ExecStatus::Error;
    c.per_question_results.push_back(std::move(r));
  }
  return c;
}

conceptualize::SimilarQuestionSet make_set(int m) {
  conceptualize::SimilarQuestionSet set;
  set.abstract.text_with_placeholders = "Can an X do Y?";
  set.abstract.source_question_id = "orig";
  for (int i = 0; i < m; ++i) {
    conceptualize::SimilarQuestion s;
    s.record.id = "s" + std::to_string(i);
    s.record.text = "similar " + std::to_string(i);
    s.silver = Answer::yes();
    set.similars.push_back(std::move(s));
  }
  return set;
}

// ---- criterion 2: the high/low accuracy thresholds follow the stated law ----

void criterion_threshold_law() {
  conceptualize::SelectionConfig cfg;
  oracle::LexicalSimilarity sim;
  std::mt19937 rng(20260826);

  for (int m = 1; m <= 30; ++m) {
    auto set = make_set(m);
    std::uniform_int_distribution<int> match_dist(0, m);
    std::vector<conceptualize::CandidateProgram> candidates;
    std::vector<int> match_counts;
    for (int i = 0; i < 12; ++i) {
      int matches = match_dist(rng);
      match_counts.push_back(matches);
      candidates.push_back(make_candidate(kSoundSource, matches, 0));
    }

    auto result =
        conceptualize::apply_selection(candidates, set, cfg, sim, "unrelated original text");
    require(result.m == m, "selection reported the wrong silver count");

    for (std::size_t i = 0; i < candidates.size(); ++i) {
      // brute-force restatement of the law, independent of the implementation
      bool expect_high = static_cast<double>(match_counts[i]) >= std::max(3.0, 0.75 * m);
      bool expect_low = match_counts[i] >= 2;
      bool got_high =
          std::find(result.high_pass.begin(), result.high_pass.end(), i) != result.high_pass.end();
      bool got_low =
          std::find(result.low_pass.begin(), result.low_pass.end(), i) != result.low_pass.end();
      require(got_high == expect_high,
              "high tier disagrees at M=" + std::to_string(m) + ", matches=" +
                  std::to_string(match_counts[i]));
      require(got_low == expect_low,
              "low tier disagrees at M=" + std::to_string(m) + ", matches=" +
                  std::to_string(match_counts[i]));
    }
  }
}

// ---- criterion 3: the confidence gate over all answer compositions ----

void criterion_confidence_gate() {
  const int k = 10, x = 9;
  int compositions = 0;
  for (int yes = 0; yes <= k; ++yes) {
    for (int no = 0; yes + no <= k; ++no) {
      int unknown = k - yes - no;
      ++compositions;
      std::vector<Answer> answers;
      for (int i = 0; i < yes; ++i) answers.push_back(Answer::yes());
      for (int i = 0; i < no; ++i) answers.push_back(Answer::no());
      for (int i = 0; i < unknown; ++i) answers.push_back(Answer::unknown());

      auto verdict = conceptualize::gate_decision(answers, x);
      // brute-force oracle: a modal concrete answer of at least x admits
      bool expect = std::max(yes, no) >= x;
      require(verdict.has_value() == expect,
              "gate disagrees at yes=" + std::to_string(yes) + " no=" + std::to_string(no) +
                  " unknown=" + std::to_string(unknown));
      if (verdict) {
        auto kind = yes > no ? oracle::AnswerKind::Yes : oracle::AnswerKind::No;
        require(verdict->kind == kind, "gate admitted the wrong modal answer");
      }
    }
  }
  require(compositions == 66, "expected 66 compositions, saw " + std::to_string(compositions));
}

// ---- criterion 4: iteration statistics reproduce the frozen journal set ----

void criterion_iteration_stats() {
  const auto start = std::chrono::steady_clock::now();
  const int counts[] = {344, 103, 92, 46, 15, 1};
  std::vector<simplify::SimplificationJournal> journals;
  int id = 0;
  for (int iter = 0; iter < 6; ++iter) {
    for (int i = 0; i < counts[iter]; ++i) {
      simplify::SimplificationJournal j;
      j.question_id = "q" + std::to_string(id++);
      j.status = simplify::SimplificationJournal::Status::Consensus;
      for (int k = 0; k <= iter; ++k) {
        simplify::IterationRecord r;
        r.iteration = k;
        if (k == iter) r.consensus = Value::decimal(4.0);
        j.iterations.push_back(std::move(r));
      }
      journals.push_back(std::move(j));
    }
  }
  while (journals.size() < 1358) {
    simplify::SimplificationJournal j;
    j.question_id = "q" + std::to_string(id++);
    j.status = simplify::SimplificationJournal::Status::BudgetExhausted;
    journals.push_back(std::move(j));
  }

  auto stats = simplify::collect_stats(journals);
  require(stats.rows.size() == 6, "expected six iteration rows");
  const double expected_pct[] = {25.3, 32.9, 39.7, 43.1, 44.2, 44.3};
  for (int i = 0; i < 6; ++i) {
    require(stats.rows[i].instances_gained == counts[i],
            "wrong first-consensus count at iteration " + std::to_string(i));
    double rounded = std::round(stats.rows[i].collected_pct * 10.0) / 10.0;
    require(std::fabs(rounded - expected_pct[i]) < 1e-9,
            "collected_pct at iteration " + std::to_string(i) + " is " + std::to_string(rounded));
  }
  require(std::chrono::steady_clock::now() - start < std::chrono::seconds(1),
          "statistics suite exceeded the 1s budget");
}

// ---- criterion 5: conceptualization golden run is byte-stable ----

void criterion_golden_run() {
  auto questions = data::ingest(std::string(FIXTURE_DIR) + "/concept_questions.jsonl", "jsonl");
  require(questions.size() == 5, "golden fixture must carry five questions");

  auto run = [&](int threads) {
    auto client = oracle::Client(std::make_shared<ScriptedBackend>(ScriptedBackend::from_json_file(
        std::string(FIXTURE_DIR) + "/concept_script.json")));
    auto similarity = oracle::default_similarity();
    conceptualize::ConceptOptions options;
    options.threads = threads;
    auto result = conceptualize::run_conceptualization(questions, options, client, *similarity);
    std::ostringstream out;
    for (const auto& inst : result.instances) out << inst.to_json().dump() << "\n";
    return out.str();
  };

  const std::string serial = run(1);
  require(!serial.empty(), "golden run emitted no instances");
  require(serial == run(1), "two serial runs differ");
  require(serial == run(8), "serial and concurrent runs differ");
}

// ---- criterion 6: the three simplification stopping conditions ----

void criterion_simplification_stopping() {
  QuestionRecord benny;
  benny.id = "benny";
  benny.dataset = data::Dataset::Gsm8k;
  benny.text =
      "Benny bought 2 soft drinks for $4 each and 5 candy bars. He spent a total of 28 "
      "dollars. How much did each candy bar cost?";
  auto div_program = [](int a, int b) {
    return "def answer(a: int, b: int) -> float:\n    return a / b\nWith parameters a=" +
           std::to_string(a) + ", b=" + std::to_string(b);
  };
  simplify::SimplifyOptions options;  // sample_count 10, quota 9, max_iters 5

  // (a) the decomposer reports nothing further to decompose
  auto terminal_client = client_for(
      {{{"Extract the given conditions"}, {"Benny spent 28 dollars.\n"}},
       {{"based on the provided reference answer"}, {div_program(8, 2), div_program(10, 2)}},
       {{"Decompose the math question"}, {"No more decomposition."}}});
  auto terminal = simplify::run_simplification(benny, options, terminal_client);
  require(terminal.status == simplify::SimplificationJournal::Status::TerminalNoConsensus,
          "terminal fixture did not stop as terminal_no_consensus");

  // (b) nine of ten sampled programs agree: consensus at the stated quota
  std::vector<std::string> nine_to_one(9, div_program(8, 2));
  nine_to_one.push_back(div_program(10, 2));
  auto consensus_client =
      client_for({{{"Extract the given conditions"}, {"Benny spent 28 dollars.\n"}},
                  {{"based on the provided reference answer"}, nine_to_one}});
  auto consensus = simplify::run_simplification(benny, options, consensus_client);
  require(consensus.status == simplify::SimplificationJournal::Status::Consensus,
          "consensus fixture did not reach consensus");
  require(consensus.consensus_iteration() == 0, "consensus fixture stopped at the wrong round");

  // (c) the iteration budget runs out while folding keeps succeeding
  auto budget_client = client_for(
      {{{"Extract the given conditions"}, {"Benny spent 28 dollars.\n"}},
       {{"based on the provided reference answer"}, {div_program(8, 2), div_program(10, 2)}},
       {{"Decompose the math question"}, {"How much did the soft drinks cost in total?"}},
       {{"thinking step by step"}, {"The soft drinks cost <<2*4=8>> #### 8"}},
       {{"Convert the given math question and its answer"}, {"The soft drinks cost 8 dollars."}}});
  auto budget = simplify::run_simplification(benny, options, budget_client);
  require(budget.status == simplify::SimplificationJournal::Status::BudgetExhausted,
          "budget fixture did not exhaust its iteration budget");
  require(budget.iterations.size() == 6, "budget fixture ran the wrong number of iterations");

  // the three outcomes stay distinguishable in the serialized journals
  std::string a = simplify::status_name(terminal.status);
  std::string b = simplify::status_name(consensus.status);
  std::string c = simplify::status_name(budget.status);
  require(a != b && b != c && a != c, "journal statuses are not distinguishable");
  require(terminal.to_json().at("status") == a && budget.to_json().at("status") == c,
          "journal JSON does not carry the status");
}

// ---- criterion 7: the retrieval second pass is gated on unknown ----

void criterion_rag_gating() {
  QuestionRecord museum;
  museum.id = "museum";
  museum.dataset = data::Dataset::StrategyQa;
  museum.text = "Can I visit Museum X 20 times with 100 dollars?";

  const std::string yes_program = "def answer() -> bool:\n    return True\n";
  const std::string asking_program =
      "def answer() -> bool:\n"
      "    price = ask_llm(\"What is the ticket price of Museum X?\", float)\n"
      "    budget = ask_llm(\"How much is 100 dollars divided by 20?\", float)\n"
      "    return price < budget\n";

  int prose_calls = 0;     // rag_answer renderings
  int second_passes = 0;   // program re-samplings conditioned on retrieved prose
  auto backend = std::make_shared<oracle::LambdaBackend>(
      [&](const oracle::Transcript& t) -> std::vector<std::string> {
        std::string text;
        for (const auto& m : t.messages) text += m.content;
        auto n = static_cast<std::size_t>(t.sampling.n);
        if (text.find("measurement unit") != std::string::npos) return {"None"};
        if (text.find("short paragraph") != std::string::npos) {
          ++prose_calls;
          return {"Museum X tickets cost 4 dollars each."};
        }
        if (text.find("based on the provided reference answer") != std::string::npos) {
          ++second_passes;
          return std::vector<std::string>(n, yes_program);
        }
        if (text.find("Solve this question with a Python program") != std::string::npos)
          return std::vector<std::string>(n, asking_program);
        if (text.find("ticket price of Museum X") != std::string::npos)
          return {"{\"answer\": \"unknown\"}"};
        if (text.find("100 dollars divided by 20") != std::string::npos)
          return {"{\"answer\": 5}"};
        throw CheckFailure("unexpected transcript: " + text);
      });
  oracle::Client client(backend);

  auto first = infer::first_pass(museum, 10, client);
  require(first.value.kind == oracle::AnswerKind::Unknown, "setup: first pass must be unknown");
  auto resolved = infer::rag_second_pass(museum, std::move(first), 10, client);
  require(resolved.pass == infer::VotedAnswer::Pass::Rag, "second pass did not run");
  require(resolved.value.kind == oracle::AnswerKind::Yes, "second pass lost the retrieved answer");
  require(second_passes == 1,
          "expected exactly one second pass, saw " + std::to_string(second_passes));
  require(prose_calls > 0, "second pass never retrieved prose context");

  // a concrete first-pass verdict must suppress retrieval entirely
  int forbidden_calls = 0;
  auto concrete_backend = std::make_shared<oracle::LambdaBackend>(
      [&](const oracle::Transcript& t) -> std::vector<std::string> {
        std::string text;
        for (const auto& m : t.messages) text += m.content;
        if (text.find("short paragraph") != std::string::npos ||
            text.find("based on the provided reference answer") != std::string::npos)
          ++forbidden_calls;
        return std::vector<std::string>(static_cast<std::size_t>(t.sampling.n), yes_program);
      });
  oracle::Client concrete_client(concrete_backend);
  auto concrete = infer::first_pass(museum, 10, concrete_client);
  require(concrete.value.kind == oracle::AnswerKind::Yes, "setup: first pass must be concrete");
  auto unchanged = infer::rag_second_pass(museum, std::move(concrete), 10, concrete_client);
  require(unchanged.pass == infer::VotedAnswer::Pass::First, "second pass ran despite a verdict");
  require(forbidden_calls == 0,
          "concrete first pass still made " + std::to_string(forbidden_calls) + " retrieval calls");
}

// ---- criterion 8: extraction never reads gold labels ----

void criterion_no_gold_leakage() {
  // the instrument itself must bite: a gold read inside an extraction scope aborts
  data::ExtractionScope::reset_counters();
  {
    QuestionRecord guarded;
    guarded.id = "guarded";
    guarded.set_gold(Answer::yes());
    data::ExtractionScope scope;
    bool aborted = false;
    try {
      (void)guarded.gold_for_eval();
    } catch (const std::logic_error&) {
      aborted = true;
    }
    require(aborted, "instrumentation failed to abort a scoped gold read");
    require(data::ExtractionScope::violations() == 1, "violation was not counted");
  }

  // a full extraction run over gold-bearing seen-split records reads nothing
  data::ExtractionScope::reset_counters();
  auto questions = data::ingest(std::string(FIXTURE_DIR) + "/concept_questions.jsonl", "jsonl");
  for (const auto& q : questions)
    require(q.has_gold() && q.split == data::Split::Seen,
            "fixture records must be gold-bearing seen-split questions");

  auto client = oracle::Client(std::make_shared<ScriptedBackend>(
      ScriptedBackend::from_json_file(std::string(FIXTURE_DIR) + "/concept_script.json")));
  auto similarity = oracle::default_similarity();
  auto result = conceptualize::run_conceptualization(questions, {}, client, *similarity);
  require(!result.instances.empty(), "extraction run produced no instances");
  require(data::ExtractionScope::gold_reads() == 0,
          "extraction performed " + std::to_string(data::ExtractionScope::gold_reads()) +
              " gold reads");
  require(data::ExtractionScope::violations() == 0, "extraction tripped the gold firewall");
  data::ExtractionScope::reset_counters();
}

// ---- criterion 9: the program drop filters on a fixed 12-candidate set ----

void criterion_drop_filters() {
  conceptualize::SelectionConfig cfg;
  oracle::LexicalSimilarity sim;
  const std::string original = "Can a dog run faster than a cheetah?";
  auto set = make_set(4);  // high threshold = max(3, 3) = 3

  const std::string verbatim_repeat =
      "def answer(a: str) -> bool:\n"
      "    x = ask_llm(\"Can a dog run faster than a cheetah?\", bool)\n"
      "    y = ask_llm(\"is \" + a + \" fast?\", bool)\n"
      "    return x and y\n";
  const std::string single_call =
      "def answer(a: str) -> bool:\n    return ask_llm(\"is \" + a + \" fast?\", bool)\n";
  const std::string unused_param =
      "def answer(a: str, b: str) -> bool:\n"
      "    x = ask_llm(\"one \" + a, bool)\n"
      "    y = ask_llm(\"two \" + a, bool)\n"
      "    return x and y\n";

  std::vector<conceptualize::CandidateProgram> candidates;
  candidates.push_back(make_candidate(kSoundSource, 4, 0));       // 0: survivor, high + low
  candidates.push_back(make_candidate(verbatim_repeat, 4, 0));    // 1: similarity
  candidates.push_back(make_candidate(single_call, 4, 0));        // 2: complexity
  candidates.push_back(make_candidate(unused_param, 4, 0));       // 3: soundness
  candidates.push_back(make_candidate(kSoundSource, 1, 3));       // 4: soundness (3 errors)
  candidates.push_back(make_candidate(kSoundSource, 3, 0));       // 5: survivor, high + low
  candidates.push_back(make_candidate(kSoundSource, 2, 0));       // 6: survivor, low only
  candidates.push_back(make_candidate(kSoundSource, 1, 0));       // 7: survivor, no tier
  candidates.push_back(make_candidate(verbatim_repeat, 2, 0));    // 8: similarity
  candidates.push_back(make_candidate(single_call, 2, 0));        // 9: complexity
  // parse failure: zero statically countable oracle calls, so the default
  // filter order attributes the drop to complexity
  candidates.push_back(make_candidate("def broken(", 0, 0));      // 10: complexity
  candidates.push_back(make_candidate(kSoundSource, 2, 2));       // 11: survivor, two errors ok

  const std::vector<std::string> expected_reasons = {
      "", "similarity", "complexity", "soundness", "soundness", "",
      "", "",           "similarity", "complexity", "complexity", ""};

  auto result = conceptualize::apply_selection(candidates, set, cfg, sim, original);
  require(result.drop_reasons == expected_reasons, "drop reasons disagree with the fixture");
  require(result.high_pass == std::vector<std::size_t>{0, 5}, "wrong high-accuracy tier");
  require(result.low_pass == (std::vector<std::size_t>{0, 5, 6, 11}), "wrong low-accuracy tier");

  // every permutation of the three filters keeps the survivor set identical
  using conceptualize::DropCriterion;
  std::vector<DropCriterion> order = {DropCriterion::Similarity, DropCriterion::Complexity,
                                      DropCriterion::Soundness};
  std::sort(order.begin(), order.end());
  do {
    auto permuted = conceptualize::apply_selection(candidates, set, cfg, sim, original, order);
    require(permuted.high_pass == result.high_pass && permuted.low_pass == result.low_pass,
            "filter order changed the survivor set");
    for (std::size_t i = 0; i < candidates.size(); ++i)
      require(permuted.drop_reasons[i].empty() == result.drop_reasons[i].empty(),
              "filter order changed a drop verdict");
  } while (std::next_permutation(order.begin(), order.end()));
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    std::function<void()> run;
  };
  const std::vector<Criterion> criteria = {
      {"criterion 1: interpreter solves the worked reference programs", criterion_interpreter},
      {"criterion 2: accuracy thresholds follow max(3, 0.75 M) and the low floor",
       criterion_threshold_law},
      {"criterion 3: confidence gate admits exactly modal-answer >= 9 of 10",
       criterion_confidence_gate},
      {"criterion 4: iteration statistics reproduce the frozen journal set",
       criterion_iteration_stats},
      {"criterion 5: conceptualization golden run is byte-identical and thread-stable",
       criterion_golden_run},
      {"criterion 6: simplification stops on terminal, consensus, and budget",
       criterion_simplification_stopping},
      {"criterion 7: retrieval second pass runs exactly once and only on unknown",
       criterion_rag_gating},
      {"criterion 8: extraction code paths never read gold labels",
       criterion_no_gold_leakage},
      {"criterion 9: drop filters give the fixed verdicts, in any order",
       criterion_drop_filters},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    try {
      criterion.run();
      std::cout << "PASS " << criterion.label << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL " << criterion.label << " (" << e.what() << ")\n";
    }
  }
  return failures == 0 ? 0 : 1;
}
