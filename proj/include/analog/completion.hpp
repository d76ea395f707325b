#pragma once

#include <optional>
#include <string>

#include "analog/interp.hpp"

namespace analog::dsl {

/// Parses a "With parameters a=1, b="x"" clause. Values may be numbers,
/// quoted strings, True/False, or bare words. Absent when no clause exists.
std::optional<ParameterBinding> parse_binding_clause(const std::string& text);

struct CompletionProgram {
  std::string source;  // extracted code region (may still fail to parse)
  std::optional<ParameterBinding> binding;
};

/// Splits a model completion into a program source region (markdown fences
/// honored, otherwise from the first `def` line) and an optional parameter
/// binding clause.
CompletionProgram split_program_completion(const std::string& completion);

}  // namespace analog::dsl
