#include "analog/interp.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace analog::dsl {

using nlohmann::json;
using oracle::Message;
using oracle::Transcript;

namespace {

constexpr int kMaxCallDepth = 16;

struct ExecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Value json_to_value(const json& j) {
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) return Value::integer(j.get<long long>());
  if (j.is_number_float()) {
    double v = j.get<double>();
    if (v == std::floor(v) && std::abs(v) < 1e15) return Value::integer(static_cast<long long>(v));
    return Value::decimal(v);
  }
  if (j.is_string()) return Value::text(j.get<std::string>());
  throw AskError("JSON answer is not a scalar");
}

Value coerce(const Value& v, ValueKind expected) {
  switch (expected) {
    case ValueKind::Integer:
      if (v.is_number()) {
        double d = v.as_number();
        if (d == std::floor(d)) return Value::integer(static_cast<long long>(d));
        throw AskError("expected an integer, got " + v.repr());
      }
      if (v.is_text()) {
        try {
          std::size_t used = 0;
          long long parsed = std::stoll(trim_copy(v.as_text()), &used);
          return Value::integer(parsed);
        } catch (...) {
        }
      }
      throw AskError("cannot coerce '" + v.repr() + "' to integer");
    case ValueKind::Decimal:
      if (v.is_number()) return Value::decimal(v.as_number());
      if (v.is_text()) {
        try {
          return Value::decimal(std::stod(trim_copy(v.as_text())));
        } catch (...) {
        }
      }
      throw AskError("cannot coerce '" + v.repr() + "' to decimal");
    case ValueKind::Boolean: {
      if (v.is_boolean()) return v;
      if (v.is_text()) {
        std::string t = lower_copy(trim_copy(v.as_text()));
        if (t == "yes" || t == "true") return Value::boolean(true);
        if (t == "no" || t == "false") return Value::boolean(false);
      }
      throw AskError("cannot coerce '" + v.repr() + "' to boolean");
    }
    case ValueKind::Text:
      if (v.is_text()) return v;
      return Value::text(v.repr());
  }
  throw AskError("unreachable coercion");
}

class Interpreter {
 public:
  Interpreter(const ProgramAst& ast, oracle::Client& client, const ExecutionLimits& limits,
              std::vector<TraceEntry>& trace)
      : ast_(ast), client_(client), limits_(limits), trace_(trace) {
    for (const auto& fn : ast.functions) functions_[fn.name] = &fn;
  }

  Value run(const ParameterBinding& binding) {
    const FunctionDef& entry = ast_.entry();
    std::map<std::string, Value> env;
    for (const auto& p : entry.params) env.emplace(p.name, binding.at(p.name));
    auto result = exec_block(entry.body, env, 0);
    if (!result) throw ExecError("entry function returned no value");
    // the entry's declared return kind is a hard contract
    if (ast_.return_kind == ReturnKind::Boolean) {
      if (!result->is_boolean()) throw ExecError("entry must return a boolean, got " + result->repr());
    } else {
      if (!result->is_number()) throw ExecError("entry must return a number, got " + result->repr());
    }
    return *result;
  }

 private:
  void tick() {
    if (++steps_ > limits_.max_steps) throw ExecError("step budget exceeded");
  }

  std::optional<Value> exec_block(const std::vector<Stmt>& body, std::map<std::string, Value>& env,
                                  int depth) {
    for (const auto& s : body) {
      tick();
      switch (s.kind) {
        case Stmt::Kind::Assign:
          env.insert_or_assign(s.target, eval(*s.value, env, depth));
          break;
        case Stmt::Kind::Return:
          return eval(*s.value, env, depth);
        case Stmt::Kind::ExprStmt:
          eval(*s.value, env, depth);
          break;
        case Stmt::Kind::If: {
          for (const auto& arm : s.arms) {
            bool taken = true;
            if (arm.condition) {
              Value c = eval(*arm.condition, env, depth);
              if (!c.is_boolean()) throw ExecError("condition is not a boolean");
              taken = c.as_boolean();
            }
            if (taken) {
              if (auto r = exec_block(arm.body, env, depth)) return r;
              break;
            }
          }
          break;
        }
      }
    }
    return std::nullopt;
  }

  Value eval(const Expr& e, std::map<std::string, Value>& env, int depth) {
    tick();
    switch (e.kind) {
      case Expr::Kind::Number:
        return e.integer_literal ? Value::integer(static_cast<long long>(e.number))
                                 : Value::decimal(e.number);
      case Expr::Kind::String:
        return Value::text(e.text);
      case Expr::Kind::Bool:
        return Value::boolean(e.number != 0.0);
      case Expr::Kind::Name: {
        auto it = env.find(e.text);
        if (it == env.end()) throw ExecError("unbound name '" + e.text + "'");
        return it->second;
      }
      case Expr::Kind::Unary: {
        if (e.op == "not") {
          Value v = eval(*e.lhs, env, depth);
          if (!v.is_boolean()) throw ExecError("'not' needs a boolean");
          return Value::boolean(!v.as_boolean());
        }
        Value v = eval(*e.lhs, env, depth);
        if (!v.is_number()) throw ExecError("unary '" + e.op + "' needs a number");
        double d = e.op == "-" ? -v.as_number() : v.as_number();
        return v.kind() == ValueKind::Integer ? Value::integer(static_cast<long long>(d))
                                              : Value::decimal(d);
      }
      case Expr::Kind::Binary:
        return eval_binary(e, env, depth);
      case Expr::Kind::Call:
        return eval_call(e, env, depth);
    }
    throw ExecError("unreachable expression kind");
  }

  Value eval_binary(const Expr& e, std::map<std::string, Value>& env, int depth) {
    if (e.op == "and" || e.op == "or") {
      Value lhs = eval(*e.lhs, env, depth);
      if (!lhs.is_boolean()) throw ExecError("'" + e.op + "' needs booleans");
      if (e.op == "and" && !lhs.as_boolean()) return Value::boolean(false);
      if (e.op == "or" && lhs.as_boolean()) return Value::boolean(true);
      Value rhs = eval(*e.rhs, env, depth);
      if (!rhs.is_boolean()) throw ExecError("'" + e.op + "' needs booleans");
      return rhs;
    }
    Value lhs = eval(*e.lhs, env, depth);
    Value rhs = eval(*e.rhs, env, depth);
    if (e.op == "==" || e.op == "!=") {
      bool eq = soft_equal(lhs, rhs);
      return Value::boolean(e.op == "==" ? eq : !eq);
    }
    if (e.op == "<" || e.op == "<=" || e.op == ">" || e.op == ">=") {
      if (!lhs.is_number() || !rhs.is_number())
        throw ExecError("comparison '" + e.op + "' needs numbers");
      double a = lhs.as_number(), b = rhs.as_number();
      bool r = e.op == "<" ? a < b : e.op == "<=" ? a <= b : e.op == ">" ? a > b : a >= b;
      return Value::boolean(r);
    }
    if (e.op == "+" && lhs.is_text() && rhs.is_text())
      return Value::text(lhs.as_text() + rhs.as_text());
    if (!lhs.is_number() || !rhs.is_number())
      throw ExecError("arithmetic '" + e.op + "' needs numbers");
    double a = lhs.as_number(), b = rhs.as_number();
    bool both_int = lhs.kind() == ValueKind::Integer && rhs.kind() == ValueKind::Integer;
    if (e.op == "+") return both_int ? Value::integer(static_cast<long long>(a + b)) : Value::decimal(a + b);
    if (e.op == "-") return both_int ? Value::integer(static_cast<long long>(a - b)) : Value::decimal(a - b);
    if (e.op == "*") return both_int ? Value::integer(static_cast<long long>(a * b)) : Value::decimal(a * b);
    if (e.op == "/") {
      if (b == 0.0) throw ExecError("division by zero");
      return Value::decimal(a / b);
    }
    if (e.op == "//") {
      if (b == 0.0) throw ExecError("division by zero");
      double q = std::floor(a / b);
      return both_int ? Value::integer(static_cast<long long>(q)) : Value::decimal(q);
    }
    if (e.op == "%") {
      if (b == 0.0) throw ExecError("modulo by zero");
      double r = a - std::floor(a / b) * b;
      return both_int ? Value::integer(static_cast<long long>(r)) : Value::decimal(r);
    }
    throw ExecError("unknown operator '" + e.op + "'");
  }

  Value eval_call(const Expr& e, std::map<std::string, Value>& env, int depth) {
    if (is_oracle_callee(e.callee)) return eval_oracle_call(e, env, depth);
    if (e.callee == "soft_eq") {
      if (e.args.size() != 2) throw ExecError("soft_eq takes two arguments");
      return Value::boolean(soft_equal(eval(*e.args[0], env, depth), eval(*e.args[1], env, depth)));
    }
    if (e.callee == "str") {
      if (e.args.size() != 1) throw ExecError("str takes one argument");
      return Value::text(eval(*e.args[0], env, depth).repr());
    }
    if (e.callee == "int" || e.callee == "float") {
      if (e.args.size() != 1) throw ExecError(e.callee + " takes one argument");
      Value v = eval(*e.args[0], env, depth);
      try {
        return coerce(v, e.callee == "int" ? ValueKind::Integer : ValueKind::Decimal);
      } catch (const AskError& err) {
        throw ExecError(err.what());
      }
    }
    if (e.callee == "abs" || e.callee == "round") {
      if (e.args.size() != 1) throw ExecError(e.callee + " takes one argument");
      Value v = eval(*e.args[0], env, depth);
      if (!v.is_number()) throw ExecError(e.callee + " needs a number");
      double d = e.callee == "abs" ? std::abs(v.as_number()) : std::round(v.as_number());
      if (e.callee == "round") return Value::integer(static_cast<long long>(d));
      return v.kind() == ValueKind::Integer ? Value::integer(static_cast<long long>(d))
                                            : Value::decimal(d);
    }
    if (e.callee == "min" || e.callee == "max") {
      if (e.args.size() < 2) throw ExecError(e.callee + " takes at least two arguments");
      Value best = eval(*e.args[0], env, depth);
      if (!best.is_number()) throw ExecError(e.callee + " needs numbers");
      bool all_int = best.kind() == ValueKind::Integer;
      double acc = best.as_number();
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        Value v = eval(*e.args[i], env, depth);
        if (!v.is_number()) throw ExecError(e.callee + " needs numbers");
        all_int = all_int && v.kind() == ValueKind::Integer;
        acc = e.callee == "min" ? std::min(acc, v.as_number()) : std::max(acc, v.as_number());
      }
      return all_int ? Value::integer(static_cast<long long>(acc)) : Value::decimal(acc);
    }
    auto it = functions_.find(e.callee);
    if (it == functions_.end()) throw ExecError("call to unknown function '" + e.callee + "'");
    const FunctionDef& fn = *it->second;
    if (fn.params.size() != e.args.size())
      throw ExecError("'" + fn.name + "' expects " + std::to_string(fn.params.size()) +
                      " arguments");
    if (depth + 1 > kMaxCallDepth) throw ExecError("call depth exceeded");
    std::map<std::string, Value> callee_env;
    for (std::size_t i = 0; i < e.args.size(); ++i)
      callee_env.emplace(fn.params[i].name, eval(*e.args[i], env, depth));
    auto result = exec_block(fn.body, callee_env, depth + 1);
    if (!result) throw ExecError("'" + fn.name + "' returned no value");
    return *result;
  }

  Value eval_oracle_call(const Expr& e, std::map<std::string, Value>& env, int depth) {
    if (e.args.size() != 2) throw ExecError("oracle call takes (query, type)");
    if (e.args[1]->kind != Expr::Kind::Name)
      throw ExecError("oracle call type must be int, float, str, or bool");
    auto expected = kind_from_python_name(e.args[1]->text);
    if (!expected) throw ExecError("unknown oracle call type '" + e.args[1]->text + "'");
    Value query = eval(*e.args[0], env, depth);
    if (!query.is_text()) throw ExecError("oracle query must be text");
    if (++oracle_calls_ > limits_.max_oracle_calls) throw ExecError("oracle call budget exceeded");
    TraceEntry entry;
    try {
      Value v = ask_value(query.as_text(), *expected, client_, &entry);
      trace_.push_back(std::move(entry));
      return v;
    } catch (const AskUnknown&) {
      trace_.push_back(std::move(entry));
      throw;
    } catch (const AskError& err) {
      trace_.push_back(std::move(entry));
      throw ExecError(err.what());
    }
  }

  const ProgramAst& ast_;
  oracle::Client& client_;
  const ExecutionLimits& limits_;
  std::vector<TraceEntry>& trace_;
  std::map<std::string, const FunctionDef*> functions_;
  int steps_ = 0;
  int oracle_calls_ = 0;
};

}  // namespace

std::optional<Value> extract_json_answer(const std::string& text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    int nesting = 0;
    for (std::size_t j = i; j < text.size(); ++j) {
      if (text[j] == '{') ++nesting;
      if (text[j] == '}') {
        --nesting;
        if (nesting == 0) {
          auto parsed = json::parse(text.substr(i, j - i + 1), nullptr, false);
          if (!parsed.is_discarded() && parsed.is_object()) {
            if (!parsed.contains("answer")) return std::nullopt;
            try {
              return json_to_value(parsed["answer"]);
            } catch (const AskError&) {
              return std::nullopt;
            }
          }
          break;  // first balanced candidate failed; try the next '{'
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> resolve_unit(const std::string& question, oracle::Client& client) {
  Transcript t;
  t.messages.push_back(
      {"user",
       "Does the answer to the following question require a measurement unit? If it is physical "
       "metric, use SI units. If it is monetary metric, use 'USD'.\nQuestion: What is the density "
       "of copper?\nAnswer with the proper unit, or 'None' if not applicable."});
  t.messages.push_back({"assistant", "kg/m^3"});
  t.messages.push_back(
      {"user",
       "Can the following question be answered with a metric in the International System of Units "
       "(SI Units)?\nQuestion: " +
           question + "\nAnswer with the proper unit, or 'None' if not applicable."});
  t.sampling.temperature = 0.0;
  t.sampling.max_tokens = 64;
  try {
    std::string result = client.complete_one(std::move(t));
    if (result.find("None") != std::string::npos) return std::nullopt;
    std::string unit = trim_copy(result);
    if (unit.empty()) return std::nullopt;
    return unit;
  } catch (const std::exception&) {
    return std::nullopt;  // absent-with-warning: callers proceed without a unit
  }
}

Value ask_value(const std::string& question, ValueKind expected_kind, oracle::Client& client,
                TraceEntry* trace) {
  std::string query = question;
  auto unit = resolve_unit(question, client);
  if (unit) query += " Answer in " + *unit + ".";
  if (trace) {
    trace->query = query;
    trace->expected_kind = expected_kind;
    trace->unit = unit;
  }

  Transcript t;
  t.messages.push_back({"system",
                        "Answer the question in the expected type. Use your best educated guess "
                        "or estimation if needed."});
  t.messages.push_back({"user", "How many people today are related to Genghis Khan? (int)"});
  t.messages.push_back({"assistant", "{\"answer\": 35000000}"});
  t.messages.push_back({"user", query + " (" + kind_python_name(expected_kind) + ")"});
  t.sampling.temperature = 0.0;
  t.sampling.max_tokens = 256;

  std::string response = client.complete_one(std::move(t));
  auto extracted = extract_json_answer(response);
  if (!extracted) throw AskError("no JSON answer found in oracle response");
  if (extracted->is_text() && lower_copy(trim_copy(extracted->as_text())) == "unknown") {
    if (trace) trace->returned_repr = "unknown";
    throw AskUnknown();
  }
  Value v = coerce(*extracted, expected_kind);
  if (trace) trace->returned_repr = v.repr();
  return v;
}

ExecutionOutcome execute_program(const ProgramAst& ast, const ParameterBinding& binding,
                                 oracle::Client& client, const ExecutionLimits& limits) {
  ExecutionOutcome outcome;
  // binding invariants: keys exactly the entry params, kinds compatible
  const auto& params = ast.entry_params();
  if (binding.size() != params.size()) {
    outcome.error_message = "binding has " + std::to_string(binding.size()) +
                            " entries, entry declares " + std::to_string(params.size());
    return outcome;
  }
  for (const auto& p : params) {
    auto it = binding.find(p.name);
    if (it == binding.end()) {
      outcome.error_message = "binding lacks parameter '" + p.name + "'";
      return outcome;
    }
    const Value& v = it->second;
    bool ok = false;
    switch (p.kind) {
      case ValueKind::Integer:
        ok = v.is_number() && v.as_number() == std::floor(v.as_number());
        break;
      case ValueKind::Decimal:
        ok = v.is_number();
        break;
      case ValueKind::Text:
        ok = v.is_text();
        break;
      case ValueKind::Boolean:
        ok = v.is_boolean();
        break;
    }
    if (!ok) {
      outcome.error_message = "binding value for '" + p.name + "' does not match declared kind " +
                              kind_name(p.kind);
      return outcome;
    }
  }

  Interpreter interp(ast, client, limits, outcome.oracle_trace);
  try {
    Value v = interp.run(binding);
    outcome.status = ExecStatus::Value;
    outcome.value = v;
  } catch (const AskUnknown&) {
    outcome.status = ExecStatus::Unknown;
  } catch (const std::exception& err) {
    outcome.status = ExecStatus::Error;
    outcome.error_message = err.what();
  }
  return outcome;
}

}  // namespace analog::dsl
