#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "analog/infer.hpp"
#include "analog/parser.hpp"

using namespace analog;
using namespace analog::infer;
using data::QuestionRecord;
using oracle::ScriptedBackend;

namespace {

QuestionRecord museum() {
  QuestionRecord q;
  q.id = "museum";
  q.dataset = data::Dataset::StrategyQa;
  q.text = "Can I visit Museum X 20 times with 100 dollars?";
  return q;
}

const std::string kYes = "def answer() -> bool:\n    return True\n";
const std::string kNo = "def answer() -> bool:\n    return False\n";
const std::string kBroken = "def broken(";
const std::string kAsks =
    "def answer() -> bool:\n"
    "    price = ask_llm(\"What is the ticket price of Museum X?\", float)\n"
    "    budget = ask_llm(\"How much is 100 dollars divided by 20?\", float)\n"
    "    return price < budget\n";

oracle::Client client_for(std::vector<ScriptedBackend::Rule> rules) {
  return oracle::Client(std::make_shared<ScriptedBackend>(std::move(rules)));
}

std::vector<std::string> mix(int yes, int no, int broken = 0) {
  std::vector<std::string> v;
  for (int i = 0; i < yes; ++i) v.push_back(kYes);
  for (int i = 0; i < no; ++i) v.push_back(kNo);
  for (int i = 0; i < broken; ++i) v.push_back(kBroken);
  return v;
}

}  // namespace

TEST_CASE("first pass majority vote") {
  auto client = client_for({{{"Solve this question with a Python program"}, mix(7, 3)}});
  auto voted = first_pass(museum(), 10, client);
  CHECK(voted.value.kind == oracle::AnswerKind::Yes);
  CHECK(voted.pass == VotedAnswer::Pass::First);
  REQUIRE(voted.vote_counts.size() == 2);
  CHECK(voted.vote_counts[0] == std::pair<std::string, int>{"yes", 7});
  CHECK(voted.vote_counts[1] == std::pair<std::string, int>{"no", 3});
  CHECK(voted.programs.size() == 10);
}

TEST_CASE("all programs failing leaves the vote unknown") {
  auto client = client_for({{{"Solve this question with a Python program"}, mix(0, 0, 10)}});
  auto voted = first_pass(museum(), 10, client);
  CHECK(voted.value.kind == oracle::AnswerKind::Unknown);
  CHECK(voted.vote_counts.empty());
}

TEST_CASE("ties break toward the earliest sampled program") {
  auto yes_first = client_for({{{"Solve this question"}, {kYes, kNo}}});
  CHECK(first_pass(museum(), 2, yes_first).value.kind == oracle::AnswerKind::Yes);
  auto no_first = client_for({{{"Solve this question"}, {kNo, kYes}}});
  CHECK(first_pass(museum(), 2, no_first).value.kind == oracle::AnswerKind::No);
}

TEST_CASE("rag second pass runs only on unknown and reuses first-pass queries") {
  int rag_calls = 0;
  auto backend = std::make_shared<oracle::LambdaBackend>(
      [&](const oracle::Transcript& t) -> std::vector<std::string> {
        std::string text;
        for (const auto& m : t.messages) text += m.content;
        auto n = static_cast<std::size_t>(t.sampling.n);
        if (text.find("measurement unit") != std::string::npos ||
            text.find("International System of Units") != std::string::npos)
          return {"None"};
        if (text.find("short paragraph") != std::string::npos) {
          ++rag_calls;
          CHECK(t.sampling.max_tokens == 512);
          return {"Museum X tickets cost 4 dollars each, well documented."};
        }
        if (text.find("based on the provided reference answer") != std::string::npos) {
          CHECK(text.find("tickets cost 4 dollars") != std::string::npos);
          return std::vector<std::string>(n, kYes);
        }
        if (text.find("Solve this question with a Python program") != std::string::npos)
          return std::vector<std::string>(n, kAsks);
        if (text.find("ticket price of Museum X") != std::string::npos)
          return {"{\"answer\": \"unknown\"}"};
        if (text.find("100 dollars divided by 20") != std::string::npos)
          return {"{\"answer\": 5}"};
        FAIL("unexpected transcript: ", text);
        return {};
      });
  oracle::Client client(backend);

  auto first = first_pass(museum(), 10, client);
  CHECK(first.value.kind == oracle::AnswerKind::Unknown);

  auto final = rag_second_pass(museum(), std::move(first), 10, client);
  CHECK(final.value.kind == oracle::AnswerKind::Yes);
  CHECK(final.pass == VotedAnswer::Pass::Rag);
  // two distinct sub-queries answered in prose, each exactly once
  CHECK(rag_calls == 2);
}

TEST_CASE("a concrete first-pass answer suppresses the second pass entirely") {
  auto client = client_for({{{"Solve this question"}, mix(10, 0)}});
  auto first = first_pass(museum(), 10, client);
  REQUIRE(first.value.kind == oracle::AnswerKind::Yes);
  // the scripted backend has no rag_answer rule: any second-pass call would throw
  auto final = rag_second_pass(museum(), std::move(first), 10, client);
  CHECK(final.value.kind == oracle::AnswerKind::Yes);
  CHECK(final.pass == VotedAnswer::Pass::First);
  CHECK(!final.rag_skipped_no_queries);
}

TEST_CASE("unknown vote with no collectable queries returns unchanged with a note") {
  auto client = client_for({{{"Solve this question"}, mix(0, 0, 10)}});
  auto first = first_pass(museum(), 10, client);
  auto final = rag_second_pass(museum(), std::move(first), 10, client);
  CHECK(final.value.kind == oracle::AnswerKind::Unknown);
  CHECK(final.rag_skipped_no_queries);
}

TEST_CASE("conceptual answer returns the first clean abstract program") {
  conceptualize::AbstractQuestion aq;
  aq.text_with_placeholders =
      "Benny bought Number of Soft Drinks X for Cost per Soft Drink Y each and Number of "
      "Candy Bars Z. He spent a total of Total Amount Spent W dollars. How much did each "
      "candy bar cost?";
  const std::string valid =
      "def answer(num_soft_drinks_x: int, cost_per_soft_drink_y: int, num_candy_bars_z: int, "
      "total_spent_w: int) -> float:\n"
      "    total_cost_soft_drinks = num_soft_drinks_x * cost_per_soft_drink_y\n"
      "    total_cost_candy_bars = total_spent_w - total_cost_soft_drinks\n"
      "    return total_cost_candy_bars / num_candy_bars_z\n";
  const std::string unused_param =
      "def answer(a: int, b: int) -> float:\n    return a * 1.0\n";

  SUBCASE("invalid then valid: the valid one wins") {
    auto client =
        client_for({{{"Solve this abstract question"}, {kBroken, unused_param, valid}}});
    auto program = conceptual_answer(aq, 10, client);
    CHECK(program.entry_params().size() == 4);
    CHECK(program.trailer == nullptr);
  }
  SUBCASE("all invalid is an error") {
    auto client = client_for({{{"Solve this abstract question"}, {kBroken}}});
    CHECK_THROWS_AS(conceptual_answer(aq, 10, client), std::runtime_error);
  }
}

TEST_CASE("no-repeat filter drops near-verbatim queries and validates its cutoff") {
  const std::string original = "Can I visit Museum X 20 times with 100 dollars?";
  oracle::LexicalSimilarity sim;

  auto make = [](const std::string& query) {
    VotedProgram p;
    p.program = dsl::parse_program(
        "def answer() -> bool:\n    return ask_llm(\"" + query + "\", bool)\n");
    p.outcome.status = dsl::ExecStatus::Unknown;
    return p;
  };

  std::vector<VotedProgram> programs;
  programs.push_back(make("Can I visit Museum X 20 times with 100 dollars?"));  // verbatim
  programs.push_back(make("What is the ticket price of Museum X?"));            // decomposed

  auto kept = no_repeat_filter(std::move(programs), original, 0.9, sim);
  REQUIRE(kept.size() == 1);
  CHECK(dsl::static_oracle_queries(*kept[0].program)[0] ==
        "What is the ticket price of Museum X?");

  CHECK_THROWS_AS(no_repeat_filter({}, original, 1.01, sim), std::invalid_argument);
  CHECK_THROWS_AS(no_repeat_filter({}, original, 0.0, sim), std::invalid_argument);
}

TEST_CASE("lowering the no-repeat cutoff never grows the survivor set") {
  const std::string original = "alpha beta gamma delta epsilon";
  oracle::LexicalSimilarity sim;
  auto make = [](const std::string& query) {
    VotedProgram p;
    p.program = dsl::parse_program(
        "def answer() -> bool:\n    return ask_llm(\"" + query + "\", bool)\n");
    return p;
  };
  std::vector<std::string> queries = {
      "alpha beta gamma delta epsilon", "alpha beta gamma delta", "alpha beta",
      "unrelated words entirely"};
  std::size_t previous = queries.size() + 1;
  for (double cutoff : {1.0, 0.9, 0.6, 0.3, 0.1}) {
    std::vector<VotedProgram> programs;
    for (const auto& q : queries) programs.push_back(make(q));
    auto kept = no_repeat_filter(std::move(programs), original, cutoff, sim);
    CHECK(kept.size() <= previous);
    previous = kept.size();
  }
}
