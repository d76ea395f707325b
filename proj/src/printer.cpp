#include <sstream>

#include "analog/ast.hpp"

namespace analog::dsl {

namespace {

int precedence(const Expr& e) {
  if (e.kind == Expr::Kind::Binary) {
    if (e.op == "or") return 1;
    if (e.op == "and") return 2;
    if (e.op == "==" || e.op == "!=" || e.op == "<" || e.op == "<=" || e.op == ">" || e.op == ">=")
      return 4;
    if (e.op == "+" || e.op == "-") return 5;
    return 6;  // * / // %
  }
  if (e.kind == Expr::Kind::Unary) return e.op == "not" ? 3 : 7;
  return 8;
}

std::string escape_string(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string number_repr(double v, bool integer_literal) {
  if (integer_literal && v == static_cast<long long>(v)) {
    std::ostringstream os;
    os << static_cast<long long>(v);
    return os.str();
  }
  std::ostringstream os;
  os.precision(15);
  os << v;
  if (os.str().find('.') == std::string::npos && os.str().find('e') == std::string::npos)
    return os.str() + ".0";
  return os.str();
}

void print_expr_into(const Expr& e, std::ostringstream& out) {
  switch (e.kind) {
    case Expr::Kind::Number:
      out << number_repr(e.number, e.integer_literal);
      return;
    case Expr::Kind::String:
      out << '"' << escape_string(e.text) << '"';
      return;
    case Expr::Kind::Bool:
      out << (e.number != 0.0 ? "True" : "False");
      return;
    case Expr::Kind::Name:
      out << e.text;
      return;
    case Expr::Kind::Unary: {
      out << e.op;
      if (e.op == "not") out << ' ';
      bool parens = precedence(*e.lhs) < precedence(e);
      if (parens) out << '(';
      print_expr_into(*e.lhs, out);
      if (parens) out << ')';
      return;
    }
    case Expr::Kind::Binary: {
      int self = precedence(e);
      bool lp = precedence(*e.lhs) < self;
      // left-associative: equal-precedence right child needs parens
      bool rp = precedence(*e.rhs) <= self;
      if (lp) out << '(';
      print_expr_into(*e.lhs, out);
      if (lp) out << ')';
      out << ' ' << e.op << ' ';
      if (rp) out << '(';
      print_expr_into(*e.rhs, out);
      if (rp) out << ')';
      return;
    }
    case Expr::Kind::Call: {
      out << e.callee << '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out << ", ";
        print_expr_into(*e.args[i], out);
      }
      out << ')';
      return;
    }
  }
}

void print_block(const std::vector<Stmt>& body, int depth, std::ostringstream& out) {
  const std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
  for (const auto& s : body) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
        out << pad << s.target << " = ";
        print_expr_into(*s.value, out);
        out << '\n';
        break;
      case Stmt::Kind::Return:
        out << pad << "return ";
        print_expr_into(*s.value, out);
        out << '\n';
        break;
      case Stmt::Kind::ExprStmt:
        out << pad;
        print_expr_into(*s.value, out);
        out << '\n';
        break;
      case Stmt::Kind::If:
        for (std::size_t i = 0; i < s.arms.size(); ++i) {
          const auto& arm = s.arms[i];
          if (!arm.condition) {
            out << pad << "else:\n";
          } else {
            out << pad << (i == 0 ? "if " : "elif ");
            print_expr_into(*arm.condition, out);
            out << ":\n";
          }
          print_block(arm.body, depth + 1, out);
        }
        break;
    }
  }
}

void print_functions(const ProgramAst& ast, std::ostringstream& out) {
  for (std::size_t i = 0; i < ast.functions.size(); ++i) {
    const auto& fn = ast.functions[i];
    if (i) out << '\n';
    out << "def " << fn.name << '(';
    for (std::size_t p = 0; p < fn.params.size(); ++p) {
      if (p) out << ", ";
      out << fn.params[p].name;
      if (fn.params[p].annotated) out << ": " << kind_python_name(fn.params[p].kind);
    }
    out << ')';
    if (fn.return_annotation) out << " -> " << *fn.return_annotation;
    out << ":\n";
    print_block(fn.body, 1, out);
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::ostringstream out;
  print_expr_into(e, out);
  return out.str();
}

std::string print_definitions(const ProgramAst& ast) {
  std::ostringstream out;
  print_functions(ast, out);
  return out.str();
}

std::string print_program(const ProgramAst& ast) {
  std::ostringstream out;
  print_functions(ast, out);
  if (ast.trailer) {
    out << '\n';
    print_expr_into(*ast.trailer, out);
    out << '\n';
  }
  return out.str();
}

}  // namespace analog::dsl
