#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "analog/simplify.hpp"

using namespace analog;
using namespace analog::simplify;
using data::QuestionRecord;
using oracle::ScriptedBackend;

namespace {

QuestionRecord benny() {
  QuestionRecord q;
  q.id = "benny";
  q.dataset = data::Dataset::Gsm8k;
  q.text =
      "Benny bought 2 soft drinks for $4 each and 5 candy bars. He spent a total of "
      "28 dollars. How much did each candy bar cost?";
  return q;
}

std::string div_program(int a, int b) {
  return "def answer(a: int, b: int) -> float:\n    return a / b\nWith parameters a=" +
         std::to_string(a) + ", b=" + std::to_string(b);
}

oracle::Client client_for(std::vector<ScriptedBackend::Rule> rules) {
  return oracle::Client(std::make_shared<ScriptedBackend>(std::move(rules)));
}

// 9 of 10 programs appearing to execute to 4.0, one dissenting to 5.0
std::vector<std::string> nine_to_one() {
  std::vector<std::string> completions(9, div_program(8, 2));
  completions.push_back(div_program(10, 2));
  return completions;
}

}  // namespace

TEST_CASE("initial conditions: one statement per oracle output line") {
  auto client = client_for({{{"Extract the given conditions"},
                             {"Benny bought 2 soft drinks for $4 each.\n"
                              "Benny bought 5 candy bars.\n"
                              "Benny spent 28 dollars in total.\n"}}});
  auto kc = initial_conditions(benny(), client);
  REQUIRE(kc.statements.size() == 3);
  CHECK(kc.statements[0].statement == "Benny bought 2 soft drinks for $4 each.");
  CHECK(kc.statements[2].statement == "Benny spent 28 dollars in total.");
  CHECK(kc.statements[0].folded_iteration == -1);
  CHECK(kc.joined().rfind("Benny bought 2 soft drinks", 0) == 0);
}

TEST_CASE("next question: terminal marker is a case-insensitive substring") {
  KnownConditions kc{{{"something known", -1}}};
  SUBCASE("plain next question") {
    auto client = client_for({{{"Decompose the math question"},
                               {"What is the net increase in the number of lions per month?"}}});
    auto nq = next_question(benny(), kc, client);
    CHECK(!nq.terminal);
    CHECK(nq.text == "What is the net increase in the number of lions per month?");
  }
  SUBCASE("terminal marker") {
    auto client =
        client_for({{{"Decompose the math question"}, {"No More Decomposition needed here."}}});
    CHECK(next_question(benny(), kc, client).terminal);
  }
  SUBCASE("empty output is terminal with a warning") {
    auto client = client_for({{{"Decompose the math question"}, {"   "}}});
    auto nq = next_question(benny(), kc, client);
    CHECK(nq.terminal);
    CHECK(!nq.note.empty());
  }
}

TEST_CASE("answer and fold appends exactly one statement") {
  auto client = client_for(
      {{{"thinking step by step"}, {"Born 5, die 1, so <<5-1=4>> #### 4"}},
       {{"Convert the given math question and its answer"},
        {"The number of lions increase by 4 every month."}}});
  KnownConditions kc{{{"Lion cubs are born at the rate of 5 per month.", -1},
                      {"Lions die at the rate of 1 per month.", -1}}};
  IterationRecord record;
  record.iteration = 1;
  REQUIRE(answer_and_fold(kc, "What is the net increase in the number of lions per month?", 1,
                          client, record));
  REQUIRE(kc.statements.size() == 3);
  CHECK(kc.statements[2].statement == "The number of lions increase by 4 every month.");
  CHECK(kc.statements[2].folded_iteration == 1);
  CHECK(*record.answer_display == "4");
  // prior statements preserved in order
  CHECK(kc.statements[0].folded_iteration == -1);
}

TEST_CASE("propose and check clusters executed values under soft equality") {
  QuestionRecord q = benny();
  SUBCASE("nine agreeing programs meet quota 9") {
    auto client = client_for({{{"based on the provided reference answer"}, nine_to_one()}});
    auto result =
        propose_and_check(q, KnownConditions{{{"known", -1}}}, 10, 9, client, {});
    REQUIRE(result.value.has_value());
    CHECK(result.value->as_number() == doctest::Approx(4.0));
    CHECK(!result.unanimous);
    CHECK(result.consensus_sources.size() == 9);
  }
  SUBCASE("eight against two misses quota 9") {
    std::vector<std::string> completions(8, div_program(8, 2));
    completions.push_back(div_program(10, 2));
    completions.push_back(div_program(10, 2));
    auto client = client_for({{{"based on the provided reference answer"}, completions}});
    auto result = propose_and_check(q, KnownConditions{{{"known", -1}}}, 10, 9, client, {});
    CHECK(!result.value.has_value());
  }
  SUBCASE("unanimous agreement is flagged") {
    auto client = client_for({{{"based on the provided reference answer"}, {div_program(8, 2)}}});
    auto result = propose_and_check(q, KnownConditions{{{"known", -1}}}, 10, 10, client, {});
    REQUIRE(result.value.has_value());
    CHECK(result.unanimous);
  }
  SUBCASE("invalid programs keep the arithmetic total but never win") {
    std::vector<std::string> completions(9, "def broken(");
    completions.push_back(div_program(8, 2));
    auto client = client_for({{{"based on the provided reference answer"}, completions}});
    auto result = propose_and_check(q, KnownConditions{{{"known", -1}}}, 10, 9, client, {});
    CHECK(!result.value.has_value());
    CHECK(result.invalid_count == 9);
    CHECK(result.outcomes.size() == 10);
  }
}

TEST_CASE("consensus is stable under permutation of the sampled programs") {
  QuestionRecord q = benny();
  auto completions = nine_to_one();
  std::sort(completions.begin(), completions.end());
  std::optional<double> reference;
  for (int shift = 0; shift < 10; ++shift) {
    std::rotate(completions.begin(), completions.begin() + 1, completions.end());
    auto client = client_for({{{"based on the provided reference answer"}, completions}});
    auto result = propose_and_check(q, KnownConditions{{{"known", -1}}}, 10, 9, client, {});
    REQUIRE(result.value.has_value());
    if (!reference) reference = result.value->as_number();
    CHECK(result.value->as_number() == doctest::Approx(*reference));
  }
}

TEST_CASE("stopping rule: consensus at iteration zero") {
  auto client = client_for({{{"Extract the given conditions"}, {"Benny spent 28 dollars.\n"}},
                            {{"based on the provided reference answer"}, nine_to_one()}});
  SimplifyOptions options;
  auto journal = run_simplification(benny(), options, client);
  CHECK(journal.status == SimplificationJournal::Status::Consensus);
  REQUIRE(journal.iterations.size() == 1);
  CHECK(journal.consensus_iteration() == 0);
  CHECK(journal.instances.size() == 9);  // one qc2p instance per agreeing program
  for (const auto& inst : journal.instances) {
    CHECK(inst.origin == data::SupervisionInstance::Origin::Simplification);
    CHECK(inst.input_text.find("Benny spent 28 dollars.") != std::string::npos);
  }
}

TEST_CASE("stopping rule: terminal without consensus") {
  auto client = client_for(
      {{{"Extract the given conditions"}, {"Benny spent 28 dollars.\n"}},
       {{"based on the provided reference answer"}, {div_program(8, 2), div_program(10, 2)}},
       {{"Decompose the math question"}, {"no more decomposition"}}});
  SimplifyOptions options;
  auto journal = run_simplification(benny(), options, client);
  CHECK(journal.status == SimplificationJournal::Status::TerminalNoConsensus);
  REQUIRE(journal.iterations.size() == 2);
  CHECK(journal.iterations[1].terminal);
  CHECK(journal.instances.empty());
}

TEST_CASE("stopping rule: iteration budget exhaustion") {
  auto client = client_for(
      {{{"Extract the given conditions"}, {"Benny spent 28 dollars.\n"}},
       {{"based on the provided reference answer"}, {div_program(8, 2), div_program(10, 2)}},
       {{"Decompose the math question"}, {"How much did the soft drinks cost in total?"}},
       {{"thinking step by step"}, {"The soft drinks cost <<2*4=8>> #### 8"}},
       {{"Convert the given math question and its answer"}, {"The soft drinks cost 8 dollars."}}});
  SimplifyOptions options;
  auto journal = run_simplification(benny(), options, client);
  CHECK(journal.status == SimplificationJournal::Status::BudgetExhausted);
  CHECK(journal.iterations.size() == 6);  // iteration 0 plus max_iters refinements
  // monotone knowledge: each iteration folded exactly one more statement
  for (std::size_t i = 1; i < journal.iterations.size(); ++i)
    CHECK(journal.iterations[i].folded_statement.has_value());
}

TEST_CASE("quota met exactly at the last allowed iteration") {
  // the fifth refinement differs: its known conditions carry five folds
  int qc2p_calls = 0;
  auto backend = std::make_shared<oracle::LambdaBackend>(
      [&](const oracle::Transcript& t) -> std::vector<std::string> {
        std::string text;
        for (const auto& m : t.messages) text += m.content;
        auto n = static_cast<std::size_t>(t.sampling.n);
        if (text.find("Extract the given conditions") != std::string::npos)
          return {"Benny spent 28 dollars.\n"};
        if (text.find("Decompose the math question") != std::string::npos)
          return {"How much for the drinks?"};
        if (text.find("thinking step by step") != std::string::npos)
          return {"#### 8"};
        if (text.find("Convert the given math question") != std::string::npos)
          return {"fold statement"};
        ++qc2p_calls;
        if (qc2p_calls < 6) return std::vector<std::string>(n, "def broken(");
        return std::vector<std::string>(n, div_program(8, 2));
      });
  oracle::Client client(backend);
  SimplifyOptions options;
  auto journal = run_simplification(benny(), options, client);
  CHECK(journal.status == SimplificationJournal::Status::Consensus);
  CHECK(journal.iterations.size() == 6);
  CHECK(journal.consensus_iteration() == 5);
}

TEST_CASE("oracle failure mid-loop aborts with a budget_exhausted journal") {
  auto client = client_for({{{"Extract the given conditions"}, {"Benny spent 28 dollars.\n"}},
                            {{"based on the provided reference answer"},
                             {div_program(8, 2), div_program(10, 2)}}});
  // no decompose rule: the iteration-1 oracle call fails
  SimplifyOptions options;
  auto journal = run_simplification(benny(), options, client);
  CHECK(journal.status == SimplificationJournal::Status::BudgetExhausted);
  CHECK(journal.note.find("oracle failure") != std::string::npos);
}

TEST_CASE("iteration statistics reproduce the frozen worked values") {
  // 1358 questions; first-consensus counts by iteration 0..5
  const int counts[] = {344, 103, 92, 46, 15, 1};
  std::vector<SimplificationJournal> journals;
  int id = 0;
  for (int iter = 0; iter < 6; ++iter) {
    for (int i = 0; i < counts[iter]; ++i) {
      SimplificationJournal j;
      j.question_id = "q" + std::to_string(id++);
      j.status = SimplificationJournal::Status::Consensus;
      for (int k = 0; k <= iter; ++k) {
        IterationRecord r;
        r.iteration = k;
        if (k == iter) r.consensus = Value::decimal(4.0);
        j.iterations.push_back(std::move(r));
      }
      journals.push_back(std::move(j));
    }
  }
  while (journals.size() < 1358) {
    SimplificationJournal j;
    j.question_id = "q" + std::to_string(id++);
    j.status = SimplificationJournal::Status::BudgetExhausted;
    journals.push_back(std::move(j));
  }

  auto stats = collect_stats(journals);
  REQUIRE(stats.rows.size() == 6);
  const double expected_pct[] = {25.3, 32.9, 39.7, 43.1, 44.2, 44.3};
  for (int i = 0; i < 6; ++i) {
    CHECK(stats.rows[i].instances_gained == counts[i]);
    CHECK(std::round(stats.rows[i].collected_pct * 10) / 10 == doctest::Approx(expected_pct[i]));
    if (i > 0) CHECK(stats.rows[i].collected_pct >= stats.rows[i - 1].collected_pct);
  }
  CHECK(stats.rows[5].collected_pct <= 100.0);
}

TEST_CASE("iteration statistics edge cases") {
  CHECK(collect_stats({}).rows.empty());

  SimplificationJournal j;
  j.question_id = "only";
  j.status = SimplificationJournal::Status::Consensus;
  IterationRecord r;
  r.iteration = 0;
  r.consensus = Value::decimal(7.0);
  j.iterations.push_back(std::move(r));
  std::vector<SimplificationJournal> journals;
  journals.push_back(std::move(j));

  auto stats = collect_stats(journals, {{"only", 7.0}});
  REQUIRE(stats.rows.size() == 1);
  CHECK(stats.rows[0].collected_pct == doctest::Approx(100.0));
  REQUIRE(stats.rows[0].accuracy_vs_gold.has_value());
  CHECK(*stats.rows[0].accuracy_vs_gold == doctest::Approx(100.0));
}
