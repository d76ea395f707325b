#pragma once

#include <optional>
#include <string>
#include <vector>

#include "analog/answers.hpp"
#include "analog/interp.hpp"

namespace analog::data {

enum class Dataset { StrategyQa, Gsm8k, Arc, CsQa, HotpotQa, Other };
enum class Split { Train, Seen, Unseen, Dev, Test };

const char* dataset_name(Dataset d);
Dataset dataset_from_name(const std::string& name);
const char* split_name(Split s);
Split split_from_name(const std::string& name);

/// RAII marker for extraction code paths. While any scope is alive,
/// reading a gold label is a firewall violation: the read aborts and the
/// violation counter increments. The evaluator runs outside such scopes.
class ExtractionScope {
 public:
  ExtractionScope();
  ~ExtractionScope();
  ExtractionScope(const ExtractionScope&) = delete;
  ExtractionScope& operator=(const ExtractionScope&) = delete;

  static bool active();
  static long long gold_reads();
  static long long violations();
  static void reset_counters();
};

/// A concrete or abstract question with dataset/split metadata. The gold
/// label is reachable only through the instrumented accessor.
class QuestionRecord {
 public:
  std::string id;
  Dataset dataset = Dataset::Other;
  Split split = Split::Train;
  std::string text;
  std::optional<dsl::ParameterBinding> binding;
  std::vector<std::string> choices;
  std::optional<std::string> correct_choice;

  bool is_math() const { return dataset == Dataset::Gsm8k; }
  oracle::ExpectedAnswer expected_answer() const {
    return is_math() ? oracle::ExpectedAnswer::Numeric : oracle::ExpectedAnswer::Binary;
  }

  bool has_gold() const { return gold_.has_value(); }
  void set_gold(oracle::Answer a) { gold_ = std::move(a); }
  /// Evaluation-only access. Counts every read; aborts (throws) when an
  /// ExtractionScope is active.
  const oracle::Answer& gold_for_eval() const;

 private:
  std::optional<oracle::Answer> gold_;
};

}  // namespace analog::data
