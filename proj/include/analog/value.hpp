#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

namespace analog {

enum class ValueKind { Integer, Decimal, Text, Boolean };

const char* kind_name(ValueKind k);
const char* kind_python_name(ValueKind k);
std::optional<ValueKind> kind_from_python_name(const std::string& name);

/// A runtime value in the restricted program space. Integers and decimals
/// share a double representation; the kind records the declared intent.
class Value {
 public:
  static Value integer(long long v) { return Value(ValueKind::Integer, static_cast<double>(v)); }
  static Value decimal(double v) { return Value(ValueKind::Decimal, v); }
  static Value boolean(bool v) { return Value(ValueKind::Boolean, v); }
  static Value text(std::string v) { return Value(ValueKind::Text, std::move(v)); }

  ValueKind kind() const { return kind_; }
  bool is_number() const { return kind_ == ValueKind::Integer || kind_ == ValueKind::Decimal; }
  bool is_boolean() const { return kind_ == ValueKind::Boolean; }
  bool is_text() const { return kind_ == ValueKind::Text; }

  double as_number() const { return std::get<double>(data_); }
  bool as_boolean() const { return std::get<bool>(data_); }
  const std::string& as_text() const { return std::get<std::string>(data_); }

  /// Canonical display form: integral numbers print without a fraction.
  std::string repr() const;

 private:
  Value(ValueKind k, double v) : kind_(k), data_(v) {}
  Value(ValueKind k, bool v) : kind_(k), data_(v) {}
  Value(ValueKind k, std::string v) : kind_(k), data_(std::move(v)) {}

  ValueKind kind_;
  std::variant<bool, double, std::string> data_;
};

/// Optional semantic-equality hook for text pairs that fail lexical
/// comparison (e.g. an oracle-backed paraphrase check). Absent by default.
using TextFallback = std::function<bool(const std::string&, const std::string&)>;

/// Tolerant value comparison: numbers within 1e-6 relative tolerance
/// (exact when both are integers), booleans exact, text trimmed and
/// case-folded. Incomparable kinds compare false.
bool soft_equal(const Value& a, const Value& b, const TextFallback& fallback = nullptr);

/// Relative comparison used for raw doubles (same rule soft_equal applies).
bool numbers_close(double a, double b);

std::string trim_copy(const std::string& s);
std::string lower_copy(const std::string& s);

}  // namespace analog
