#include "analog/value.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace analog {

const char* kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::Integer: return "integer";
    case ValueKind::Decimal: return "decimal";
    case ValueKind::Text: return "text";
    case ValueKind::Boolean: return "boolean";
  }
  return "?";
}

const char* kind_python_name(ValueKind k) {
  switch (k) {
    case ValueKind::Integer: return "int";
    case ValueKind::Decimal: return "float";
    case ValueKind::Text: return "str";
    case ValueKind::Boolean: return "bool";
  }
  return "?";
}

std::optional<ValueKind> kind_from_python_name(const std::string& name) {
  if (name == "int") return ValueKind::Integer;
  if (name == "float") return ValueKind::Decimal;
  if (name == "str") return ValueKind::Text;
  if (name == "bool") return ValueKind::Boolean;
  return std::nullopt;
}

std::string Value::repr() const {
  switch (kind_) {
    case ValueKind::Boolean:
      return as_boolean() ? "True" : "False";
    case ValueKind::Text:
      return as_text();
    case ValueKind::Integer:
    case ValueKind::Decimal: {
      double v = as_number();
      if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
        std::ostringstream os;
        os << static_cast<long long>(v);
        return os.str();
      }
      std::ostringstream os;
      os.precision(12);
      os << v;
      return os.str();
    }
  }
  return "?";
}

std::string trim_copy(const std::string& s) {
  auto b = s.begin();
  auto e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return std::string(b, e);
}

std::string lower_copy(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool numbers_close(double a, double b) {
  if (a == b) return true;
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= 1e-6 * scale;
}

bool soft_equal(const Value& a, const Value& b, const TextFallback& fallback) {
  if (a.is_number() && b.is_number()) {
    if (a.kind() == ValueKind::Integer && b.kind() == ValueKind::Integer)
      return a.as_number() == b.as_number();
    return numbers_close(a.as_number(), b.as_number());
  }
  if (a.is_boolean() && b.is_boolean()) return a.as_boolean() == b.as_boolean();
  if (a.is_text() && b.is_text()) {
    std::string la = lower_copy(trim_copy(a.as_text()));
    std::string lb = lower_copy(trim_copy(b.as_text()));
    if (la == lb) return true;
    if (fallback) return fallback(a.as_text(), b.as_text());
    return false;
  }
  return false;  // incomparable kinds
}

}  // namespace analog
