#pragma once

#include <stdexcept>
#include <string>

#include "analog/ast.hpp"

namespace analog::dsl {

struct ParseError : std::runtime_error {
  ParseError(std::string message, int line, int col)
      : std::runtime_error(message + " (line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ")"),
        line(line),
        col(col) {}
  int line;
  int col;
};

/// Parses restricted program source into an AST. Enforces the grammar, the
/// single-`answer`-entry rule, and identifier scoping: every name read in a
/// body must be an entry parameter, a prior assignment target, a defined
/// function, or a host function. Anything outside the grammar raises
/// ParseError, which downstream selection treats as a soundness failure.
ProgramAst parse_program(const std::string& source);

}  // namespace analog::dsl
