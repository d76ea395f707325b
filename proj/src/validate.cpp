#include "analog/validate.hpp"

#include <functional>
#include <set>

namespace analog::dsl {

namespace {

void walk_exprs(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  switch (e.kind) {
    case Expr::Kind::Unary:
      walk_exprs(*e.lhs, fn);
      break;
    case Expr::Kind::Binary:
      walk_exprs(*e.lhs, fn);
      walk_exprs(*e.rhs, fn);
      break;
    case Expr::Kind::Call:
      for (const auto& a : e.args) walk_exprs(*a, fn);
      break;
    default:
      break;
  }
}

void walk_block(const std::vector<Stmt>& body, const std::function<void(const Expr&)>& fn) {
  for (const auto& s : body) {
    if (s.value) walk_exprs(*s.value, fn);
    for (const auto& arm : s.arms) {
      if (arm.condition) walk_exprs(*arm.condition, fn);
      walk_block(arm.body, fn);
    }
  }
}

}  // namespace

ValidationReport validate_program(const ProgramAst& ast) {
  ValidationReport report;
  std::set<std::string> read_names;
  int oracle_calls = 0;
  auto visit = [&](const Expr& e) {
    if (e.kind == Expr::Kind::Name) read_names.insert(e.text);
    if (e.kind == Expr::Kind::Call && is_oracle_callee(e.callee)) ++oracle_calls;
  };
  for (const auto& fn : ast.functions) walk_block(fn.body, visit);
  report.oracle_call_count = oracle_calls;
  for (const auto& p : ast.entry_params()) {
    if (!read_names.count(p.name)) {
      report.unused_params.push_back(p.name);
      report.issues.push_back("unused parameter '" + p.name + "'");
    }
  }
  return report;
}

std::vector<std::string> static_oracle_queries(const ProgramAst& ast) {
  std::vector<std::string> queries;
  auto visit = [&](const Expr& e) {
    if (e.kind == Expr::Kind::Call && is_oracle_callee(e.callee) && !e.args.empty() &&
        e.args[0]->kind == Expr::Kind::String)
      queries.push_back(e.args[0]->text);
  };
  for (const auto& fn : ast.functions) walk_block(fn.body, visit);
  return queries;
}

}  // namespace analog::dsl
