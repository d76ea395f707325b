#pragma once

#include <optional>
#include <string>

#include "analog/value.hpp"

namespace analog::oracle {

enum class AnswerKind { Yes, No, Unknown, Number };

/// A final answer at the question level: a binary verdict, a number, or
/// unknown. Raw text preserves whatever surface form produced it.
struct Answer {
  AnswerKind kind = AnswerKind::Unknown;
  double number_value = 0.0;
  std::string raw_text;

  static Answer yes() { return {AnswerKind::Yes, 0.0, "yes"}; }
  static Answer no() { return {AnswerKind::No, 0.0, "no"}; }
  static Answer unknown() { return {AnswerKind::Unknown, 0.0, "unknown"}; }
  static Answer number(double v);

  bool is_concrete() const { return kind != AnswerKind::Unknown; }
  std::string display() const;
  /// Tolerant equality: numbers via soft_equal, yes/no exact; unknown
  /// matches nothing, including another unknown.
  bool agrees_with(const Answer& other) const;
};

enum class ExpectedAnswer { Binary, Numeric };

/// Pulls the final answer out of a chain-of-thought completion. Numeric mode
/// prefers the number after the last "####" marker, falling back to the last
/// number in the text. Binary mode classifies the final sentence, then the
/// whole text, then gives unknown.
Answer extract_final_answer(const std::string& cot_text, ExpectedAnswer expected);

std::optional<double> parse_number(const std::string& text);

}  // namespace analog::oracle
