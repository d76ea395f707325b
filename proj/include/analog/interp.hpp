#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "analog/ast.hpp"
#include "analog/backend.hpp"
#include "analog/value.hpp"

namespace analog::dsl {

/// Concrete values for the entry parameters, keyed by parameter name.
using ParameterBinding = std::map<std::string, Value>;

struct TraceEntry {
  std::string query;  // final query text, unit suffix included when resolved
  ValueKind expected_kind;
  std::optional<std::string> unit;
  std::string returned_repr;
};

enum class ExecStatus { Value, Unknown, Error };

struct ExecutionOutcome {
  ExecStatus status = ExecStatus::Error;
  std::optional<Value> value;
  std::string error_message;
  std::vector<TraceEntry> oracle_trace;
};

struct ExecutionLimits {
  int max_steps = 10000;
  int max_oracle_calls = 20;
};

/// Runs the program under the binding. Deterministic given a deterministic
/// oracle; never mutates the AST or the binding. Budget exhaustion, division
/// by zero, type mismatches, and oracle transport failures produce an error
/// outcome; an oracle answer of "unknown" produces an unknown outcome.
ExecutionOutcome execute_program(const ProgramAst& ast, const ParameterBinding& binding,
                                 oracle::Client& client, const ExecutionLimits& limits = {});

/// Asks whether the question needs a measurement unit. Returns the unit
/// string, or absent when the oracle answers "None" or fails.
std::optional<std::string> resolve_unit(const std::string& question, oracle::Client& client);

/// The "answer" field of the first syntactically valid JSON object embedded
/// in the text, typed. Absent when no object or no "answer" key is found.
std::optional<Value> extract_json_answer(const std::string& text);

struct AskError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AskUnknown : std::runtime_error {
  AskUnknown() : std::runtime_error("oracle answered unknown") {}
};

/// The ask_llm host path: resolves a unit, appends "Answer in {unit}." when
/// one resolves, queries with the few-shot transcript, extracts the JSON
/// answer, and coerces to the expected kind. Throws AskError on extraction
/// or coercion failure, AskUnknown on an "unknown" answer. Fills `trace`
/// when given.
Value ask_value(const std::string& question, ValueKind expected_kind, oracle::Client& client,
                TraceEntry* trace = nullptr);

}  // namespace analog::dsl
