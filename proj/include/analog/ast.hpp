#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "analog/value.hpp"

namespace analog::dsl {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

/// Expression node in the restricted program space.
struct Expr {
  enum class Kind { Number, String, Bool, Name, Unary, Binary, Call };
  Kind kind;
  int line = 0;
  int col = 0;

  double number = 0.0;
  bool integer_literal = false;  // Number: written without a fraction

  std::string text;  // String payload or Name identifier

  std::string op;     // Unary / Binary operator spelling
  ExprPtr lhs, rhs;   // Unary uses lhs only

  std::string callee;         // Call
  std::vector<ExprPtr> args;  // Call
};

struct IfArm;

struct Stmt {
  enum class Kind { Assign, Return, If, ExprStmt };
  Kind kind;
  int line = 0;
  int col = 0;

  std::string target;  // Assign
  ExprPtr value;       // Assign / Return / ExprStmt

  std::vector<IfArm> arms;  // If: conditions in order, null condition = else
};

struct IfArm {
  ExprPtr condition;  // null for the trailing else arm
  std::vector<Stmt> body;
};

struct Param {
  std::string name;
  ValueKind kind = ValueKind::Decimal;
  bool annotated = false;
};

struct FunctionDef {
  std::string name;
  std::vector<Param> params;
  std::optional<std::string> return_annotation;  // raw annotation text (int/float/bool)
  std::vector<Stmt> body;
};

enum class ReturnKind { Boolean, Number };

/// A parsed symbolic solution: one or more function definitions with a
/// mandatory `answer` entry, plus an optional trailing concrete
/// `answer(...)` invocation.
struct ProgramAst {
  std::string source_text;
  std::vector<FunctionDef> functions;
  ExprPtr trailer;  // Call expr invoking answer, or null
  ReturnKind return_kind = ReturnKind::Number;

  const FunctionDef& entry() const;
  const std::vector<Param>& entry_params() const { return entry().params; }
};

/// True for the oracle host function names (ask_llm and its ask_gpt alias).
bool is_oracle_callee(const std::string& name);

/// True for every host function callable from programs.
bool is_host_function(const std::string& name);

/// Canonical source form. parse(print(ast)) is structurally identical to
/// ast; printing is the canonical structural-equality witness.
std::string print_program(const ProgramAst& ast);

/// Canonical source of the function definitions only, trailing invocation
/// removed. Idempotent.
std::string print_definitions(const ProgramAst& ast);

std::string print_expr(const Expr& e);

}  // namespace analog::dsl
