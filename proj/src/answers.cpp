#include "analog/answers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <sstream>

namespace analog::oracle {

Answer Answer::number(double v) {
  Answer a;
  a.kind = AnswerKind::Number;
  a.number_value = v;
  std::ostringstream os;
  os.precision(12);
  os << v;
  a.raw_text = os.str();
  return a;
}

std::string Answer::display() const {
  switch (kind) {
    case AnswerKind::Yes: return "yes";
    case AnswerKind::No: return "no";
    case AnswerKind::Unknown: return "unknown";
    case AnswerKind::Number: {
      if (number_value == std::floor(number_value) && std::abs(number_value) < 1e15) {
        std::ostringstream os;
        os << static_cast<long long>(number_value);
        return os.str();
      }
      std::ostringstream os;
      os.precision(12);
      os << number_value;
      return os.str();
    }
  }
  return "?";
}

bool Answer::agrees_with(const Answer& other) const {
  if (kind == AnswerKind::Unknown || other.kind == AnswerKind::Unknown) return false;
  if (kind == AnswerKind::Number && other.kind == AnswerKind::Number)
    return numbers_close(number_value, other.number_value);
  return kind == other.kind;
}

std::optional<double> parse_number(const std::string& text) {
  static const std::regex number_re(R"([-+]?\d[\d,]*(?:\.\d+)?)");
  std::smatch m;
  if (!std::regex_search(text, m, number_re)) return std::nullopt;
  std::string digits = m.str();
  digits.erase(std::remove(digits.begin(), digits.end(), ','), digits.end());
  try {
    return std::stod(digits);
  } catch (...) {
    return std::nullopt;
  }
}

namespace {

std::optional<double> last_number(const std::string& text) {
  static const std::regex number_re(R"([-+]?\d[\d,]*(?:\.\d+)?)");
  std::optional<double> found;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), number_re);
       it != std::sregex_iterator(); ++it) {
    std::string digits = it->str();
    digits.erase(std::remove(digits.begin(), digits.end(), ','), digits.end());
    try {
      found = std::stod(digits);
    } catch (...) {
    }
  }
  return found;
}

// Classify a text span by affirmative/negative keywords at word boundaries.
std::optional<bool> classify_binary(const std::string& span) {
  static const std::regex yes_re(R"(\b(yes|true|correct)\b)", std::regex::icase);
  static const std::regex no_re(R"(\b(no|not|false|incorrect)\b)", std::regex::icase);
  bool has_yes = std::regex_search(span, yes_re);
  bool has_no = std::regex_search(span, no_re);
  if (has_yes && !has_no) return true;
  if (has_no && !has_yes) return false;
  return std::nullopt;
}

std::string final_sentence(const std::string& text) {
  std::string trimmed = trim_copy(text);
  while (!trimmed.empty()) {
    char last = trimmed.back();
    if (last == '.' || last == '!' || last == '\n')
      trimmed.pop_back();
    else
      break;
  }
  auto pos = trimmed.find_last_of(".!\n");
  return pos == std::string::npos ? trimmed : trimmed.substr(pos + 1);
}

}  // namespace

Answer extract_final_answer(const std::string& cot_text, ExpectedAnswer expected) {
  if (expected == ExpectedAnswer::Numeric) {
    auto marker = cot_text.rfind("####");
    if (marker != std::string::npos) {
      if (auto v = parse_number(cot_text.substr(marker + 4))) return Answer::number(*v);
    }
    if (auto v = last_number(cot_text)) return Answer::number(*v);
    return Answer::unknown();
  }
  if (auto verdict = classify_binary(final_sentence(cot_text)))
    return *verdict ? Answer::yes() : Answer::no();
  if (auto verdict = classify_binary(cot_text)) return *verdict ? Answer::yes() : Answer::no();
  return Answer::unknown();
}

}  // namespace analog::oracle
