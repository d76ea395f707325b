#include "analog/completion.hpp"

#include <cctype>
#include <sstream>

namespace analog::dsl {

namespace {

const std::string kClause = "With parameters";

std::optional<Value> parse_binding_value(const std::string& raw) {
  std::string t = trim_copy(raw);
  if (t.empty()) return std::nullopt;
  if (t == "True") return Value::boolean(true);
  if (t == "False") return Value::boolean(false);
  if ((t.front() == '"' && t.back() == '"' && t.size() >= 2) ||
      (t.front() == '\'' && t.back() == '\'' && t.size() >= 2))
    return Value::text(t.substr(1, t.size() - 2));
  try {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used == t.size()) {
      if (t.find('.') == std::string::npos && v == static_cast<long long>(v))
        return Value::integer(static_cast<long long>(v));
      return Value::decimal(v);
    }
  } catch (...) {
  }
  return Value::text(t);
}

// Splits on commas that are not inside quotes.
std::vector<std::string> split_pairs(const std::string& text) {
  std::vector<std::string> parts;
  std::string current;
  char quote = 0;
  for (char c : text) {
    if (quote) {
      current.push_back(c);
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
      current.push_back(c);
      continue;
    }
    if (c == ',') {
      parts.push_back(current);
      current.clear();
      continue;
    }
    current.push_back(c);
  }
  if (!trim_copy(current).empty()) parts.push_back(current);
  return parts;
}

}  // namespace

std::optional<ParameterBinding> parse_binding_clause(const std::string& text) {
  auto pos = text.rfind(kClause);
  if (pos == std::string::npos) return std::nullopt;
  std::string rest = text.substr(pos + kClause.size());
  auto line_end = rest.find('\n');
  if (line_end != std::string::npos) rest = rest.substr(0, line_end);
  ParameterBinding binding;
  for (const auto& part : split_pairs(rest)) {
    auto eq = part.find('=');
    if (eq == std::string::npos) continue;
    std::string name = trim_copy(part.substr(0, eq));
    if (name.empty()) continue;
    // tolerate a sentence-final period on the last pair ("..., num_w=6.")
    std::string value_text = trim_copy(part.substr(eq + 1));
    if (value_text.size() >= 2 && value_text.back() == '.' &&
        value_text[value_text.size() - 2] != '"' && value_text[value_text.size() - 2] != '\'')
      value_text.pop_back();
    auto value = parse_binding_value(value_text);
    if (!value) continue;
    binding.insert_or_assign(name, *value);
  }
  if (binding.empty()) return std::nullopt;
  return binding;
}

CompletionProgram split_program_completion(const std::string& completion) {
  CompletionProgram out;
  out.binding = parse_binding_clause(completion);

  std::string body = completion;
  auto fence = body.find("```");
  if (fence != std::string::npos) {
    auto content_start = body.find('\n', fence);
    auto fence_end = body.find("```", fence + 3);
    if (content_start != std::string::npos && fence_end != std::string::npos &&
        content_start < fence_end) {
      out.source = body.substr(content_start + 1, fence_end - content_start - 1);
      return out;
    }
  }

  std::istringstream in(body);
  std::string line;
  std::ostringstream code;
  bool started = false;
  while (std::getline(in, line)) {
    if (!started) {
      if (trim_copy(line).rfind("def ", 0) == 0) started = true;
      else continue;
    }
    if (line.find(kClause) != std::string::npos) break;
    code << line << '\n';
  }
  out.source = code.str();
  return out;
}

}  // namespace analog::dsl
