#pragma once

#include <string>
#include <vector>

#include "analog/ast.hpp"

namespace analog::dsl {

/// Static facts about a parsed program that the selection criteria consume.
struct ValidationReport {
  std::vector<std::string> unused_params;
  int oracle_call_count = 0;  // static ask_llm/ask_gpt call sites
  bool parse_ok = true;
  std::vector<std::string> issues;
};

/// Report-only: lists entry parameters never read in any function body and
/// counts static oracle call sites across the whole program.
ValidationReport validate_program(const ProgramAst& ast);

/// Static string-literal queries passed to oracle calls, in source order.
std::vector<std::string> static_oracle_queries(const ProgramAst& ast);

}  // namespace analog::dsl
