#include "analog/parser.hpp"

#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace analog::dsl {

namespace {

struct Token {
  enum class Kind { Ident, Number, String, Op, Newline, Indent, Dedent, End };
  Kind kind;
  std::string text;
  double number = 0.0;
  bool integer_literal = false;
  int line = 0;
  int col = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(const std::string& source) { tokenize(source); }
  const std::vector<Token>& tokens() const { return tokens_; }

 private:
  void tokenize(const std::string& source) {
    std::istringstream in(source);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::size_t i = 0;
      int indent = 0;
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
        indent += line[i] == '\t' ? 4 : 1;
        ++i;
      }
      // blank or comment-only lines carry no indentation meaning
      if (i >= line.size() || line[i] == '#') continue;
      handle_indent(indent, line_no);
      lex_line(line, i, line_no);
      tokens_.push_back({Token::Kind::Newline, "\n", 0, false, line_no,
                         static_cast<int>(line.size()) + 1});
    }
    handle_indent(0, line_no + 1);
    tokens_.push_back({Token::Kind::End, "", 0, false, line_no + 1, 1});
  }

  void handle_indent(int indent, int line_no) {
    if (indent > indents_.back()) {
      indents_.push_back(indent);
      tokens_.push_back({Token::Kind::Indent, "", 0, false, line_no, 1});
      return;
    }
    while (indent < indents_.back()) {
      indents_.pop_back();
      tokens_.push_back({Token::Kind::Dedent, "", 0, false, line_no, 1});
    }
    if (indent != indents_.back())
      throw ParseError("inconsistent indentation", line_no, indent + 1);
  }

  void lex_line(const std::string& line, std::size_t i, int line_no) {
    while (i < line.size()) {
      char c = line[i];
      int col = static_cast<int>(i) + 1;
      if (c == ' ' || c == '\t') {
        ++i;
        continue;
      }
      if (c == '#') break;
      if (ident_start(c)) {
        std::size_t j = i;
        while (j < line.size() && ident_char(line[j])) ++j;
        tokens_.push_back({Token::Kind::Ident, line.substr(i, j - i), 0, false, line_no, col});
        i = j;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
        std::size_t j = i;
        bool saw_dot = false;
        while (j < line.size() &&
               (std::isdigit(static_cast<unsigned char>(line[j])) || (line[j] == '.' && !saw_dot))) {
          if (line[j] == '.') saw_dot = true;
          ++j;
        }
        std::string lit = line.substr(i, j - i);
        Token t{Token::Kind::Number, lit, std::stod(lit), !saw_dot, line_no, col};
        tokens_.push_back(std::move(t));
        i = j;
        continue;
      }
      if (c == '"' || c == '\'') {
        char quote = c;
        std::string value;
        std::size_t j = i + 1;
        while (j < line.size() && line[j] != quote) {
          if (line[j] == '\\' && j + 1 < line.size()) {
            char esc = line[j + 1];
            switch (esc) {
              case 'n': value.push_back('\n'); break;
              case 't': value.push_back('\t'); break;
              case '\\': value.push_back('\\'); break;
              case '\'': value.push_back('\''); break;
              case '"': value.push_back('"'); break;
              default: value.push_back(esc); break;
            }
            j += 2;
            continue;
          }
          value.push_back(line[j]);
          ++j;
        }
        if (j >= line.size()) throw ParseError("unterminated string literal", line_no, col);
        tokens_.push_back({Token::Kind::String, value, 0, false, line_no, col});
        i = j + 1;
        continue;
      }
      // multi-character operators first
      static const char* two_char[] = {"==", "!=", "<=", ">=", "//", "->"};
      bool matched = false;
      for (const char* op : two_char) {
        if (line.compare(i, 2, op) == 0) {
          tokens_.push_back({Token::Kind::Op, op, 0, false, line_no, col});
          i += 2;
          matched = true;
          break;
        }
      }
      if (matched) continue;
      static const std::string single = "+-*/%<>=(),:";
      if (single.find(c) != std::string::npos) {
        tokens_.push_back({Token::Kind::Op, std::string(1, c), 0, false, line_no, col});
        ++i;
        continue;
      }
      throw ParseError(std::string("unexpected character '") + c + "'", line_no, col);
    }
  }

  std::vector<Token> tokens_;
  std::vector<int> indents_{0};
};

class Parser {
 public:
  explicit Parser(const std::string& source) : source_(source), lexer_(source) {}

  ProgramAst parse() {
    ProgramAst ast;
    ast.source_text = source_;
    while (!at_end()) {
      if (peek_ident("def")) {
        ast.functions.push_back(parse_function());
      } else {
        // trailing concrete invocation
        ExprPtr e = parse_expression();
        expect_newline();
        if (e->kind != Expr::Kind::Call)
          throw ParseError("only function definitions and a trailing call are allowed at top level",
                           e->line, e->col);
        if (ast.trailer)
          throw ParseError("multiple trailing invocations", e->line, e->col);
        ast.trailer = std::move(e);
      }
    }
    finalize(ast);
    return ast;
  }

 private:
  const Token& peek(int ahead = 0) const {
    std::size_t i = pos_ + static_cast<std::size_t>(ahead);
    if (i >= lexer_.tokens().size()) return lexer_.tokens().back();
    return lexer_.tokens()[i];
  }
  const Token& advance() { return lexer_.tokens()[pos_++]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool peek_ident(const char* word) const {
    return peek().kind == Token::Kind::Ident && peek().text == word;
  }
  bool peek_op(const char* op) const {
    return peek().kind == Token::Kind::Op && peek().text == op;
  }
  bool match_op(const char* op) {
    if (peek_op(op)) {
      advance();
      return true;
    }
    return false;
  }
  void expect_op(const char* op) {
    if (!match_op(op))
      throw ParseError(std::string("expected '") + op + "'", peek().line, peek().col);
  }
  std::string expect_ident() {
    if (peek().kind != Token::Kind::Ident)
      throw ParseError("expected identifier", peek().line, peek().col);
    return advance().text;
  }
  void expect_newline() {
    if (peek().kind != Token::Kind::Newline)
      throw ParseError("expected end of line", peek().line, peek().col);
    advance();
  }

  FunctionDef parse_function() {
    advance();  // def
    FunctionDef fn;
    fn.name = expect_ident();
    expect_op("(");
    if (!peek_op(")")) {
      do {
        Param p;
        p.name = expect_ident();
        if (match_op(":")) {
          std::string ann = expect_ident();
          auto kind = kind_from_python_name(ann);
          if (!kind)
            throw ParseError("unknown parameter type '" + ann + "'", peek().line, peek().col);
          p.kind = *kind;
          p.annotated = true;
        }
        fn.params.push_back(std::move(p));
      } while (match_op(","));
    }
    expect_op(")");
    if (match_op("->")) fn.return_annotation = expect_ident();
    expect_op(":");
    expect_newline();
    fn.body = parse_block();
    return fn;
  }

  std::vector<Stmt> parse_block() {
    if (peek().kind != Token::Kind::Indent)
      throw ParseError("expected an indented block", peek().line, peek().col);
    advance();
    std::vector<Stmt> body;
    while (peek().kind != Token::Kind::Dedent && !at_end()) body.push_back(parse_statement());
    if (peek().kind == Token::Kind::Dedent) advance();
    if (body.empty()) throw ParseError("empty block", peek().line, peek().col);
    return body;
  }

  Stmt parse_statement() {
    const Token& t = peek();
    if (peek_ident("return")) {
      advance();
      Stmt s;
      s.kind = Stmt::Kind::Return;
      s.line = t.line;
      s.col = t.col;
      s.value = parse_expression();
      expect_newline();
      return s;
    }
    if (peek_ident("if")) return parse_if();
    if (t.kind == Token::Kind::Ident && peek(1).kind == Token::Kind::Op && peek(1).text == "=") {
      Stmt s;
      s.kind = Stmt::Kind::Assign;
      s.line = t.line;
      s.col = t.col;
      s.target = advance().text;
      advance();  // =
      s.value = parse_expression();
      expect_newline();
      return s;
    }
    Stmt s;
    s.kind = Stmt::Kind::ExprStmt;
    s.line = t.line;
    s.col = t.col;
    s.value = parse_expression();
    expect_newline();
    return s;
  }

  Stmt parse_if() {
    Stmt s;
    s.kind = Stmt::Kind::If;
    s.line = peek().line;
    s.col = peek().col;
    advance();  // if
    for (;;) {
      IfArm arm;
      arm.condition = parse_expression();
      expect_op(":");
      expect_newline();
      arm.body = parse_block();
      s.arms.push_back(std::move(arm));
      if (peek_ident("elif")) {
        advance();
        continue;
      }
      break;
    }
    if (peek_ident("else")) {
      advance();
      expect_op(":");
      expect_newline();
      IfArm arm;
      arm.body = parse_block();
      s.arms.push_back(std::move(arm));
    }
    return s;
  }

  ExprPtr parse_expression() { return parse_or(); }

  ExprPtr make_binary(std::string op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Binary;
    e->line = lhs->line;
    e->col = lhs->col;
    e->op = std::move(op);
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (peek_ident("or")) {
      advance();
      lhs = make_binary("or", std::move(lhs), parse_and());
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_not();
    while (peek_ident("and")) {
      advance();
      lhs = make_binary("and", std::move(lhs), parse_not());
    }
    return lhs;
  }

  ExprPtr parse_not() {
    if (peek_ident("not")) {
      const Token& t = advance();
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Unary;
      e->line = t.line;
      e->col = t.col;
      e->op = "not";
      e->lhs = parse_not();
      return e;
    }
    return parse_comparison();
  }

  ExprPtr parse_comparison() {
    ExprPtr lhs = parse_arith();
    static const char* ops[] = {"==", "!=", "<=", ">=", "<", ">"};
    for (const char* op : ops) {
      if (peek_op(op)) {
        advance();
        return make_binary(op, std::move(lhs), parse_arith());
      }
    }
    return lhs;
  }

  ExprPtr parse_arith() {
    ExprPtr lhs = parse_term();
    for (;;) {
      if (peek_op("+")) {
        advance();
        lhs = make_binary("+", std::move(lhs), parse_term());
      } else if (peek_op("-")) {
        advance();
        lhs = make_binary("-", std::move(lhs), parse_term());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    for (;;) {
      const char* op = nullptr;
      if (peek_op("//"))
        op = "//";
      else if (peek_op("*"))
        op = "*";
      else if (peek_op("/"))
        op = "/";
      else if (peek_op("%"))
        op = "%";
      else
        return lhs;
      advance();
      lhs = make_binary(op, std::move(lhs), parse_factor());
    }
  }

  ExprPtr parse_factor() {
    if (peek_op("-") || peek_op("+")) {
      const Token& t = advance();
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Unary;
      e->line = t.line;
      e->col = t.col;
      e->op = t.text;
      e->lhs = parse_factor();
      return e;
    }
    return parse_atom();
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Number) {
      advance();
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Number;
      e->line = t.line;
      e->col = t.col;
      e->number = t.number;
      e->integer_literal = t.integer_literal;
      return e;
    }
    if (t.kind == Token::Kind::String) {
      advance();
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::String;
      e->line = t.line;
      e->col = t.col;
      e->text = t.text;
      return e;
    }
    if (t.kind == Token::Kind::Ident) {
      if (t.text == "True" || t.text == "False") {
        advance();
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Bool;
        e->line = t.line;
        e->col = t.col;
        e->number = t.text == "True" ? 1.0 : 0.0;
        return e;
      }
      advance();
      if (peek_op("(")) {
        advance();
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Call;
        e->line = t.line;
        e->col = t.col;
        e->callee = t.text;
        if (!peek_op(")")) {
          do {
            e->args.push_back(parse_expression());
          } while (match_op(","));
        }
        expect_op(")");
        return e;
      }
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Name;
      e->line = t.line;
      e->col = t.col;
      e->text = t.text;
      return e;
    }
    if (match_op("(")) {
      ExprPtr inner = parse_expression();
      expect_op(")");
      return inner;
    }
    throw ParseError("expected an expression", t.line, t.col);
  }

  // ---- post-parse checks ----

  static bool boolean_shaped(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Bool:
        return true;
      case Expr::Kind::Unary:
        return e.op == "not";
      case Expr::Kind::Binary:
        return e.op == "and" || e.op == "or" || e.op == "==" || e.op == "!=" || e.op == "<" ||
               e.op == "<=" || e.op == ">" || e.op == ">=";
      case Expr::Kind::Call:
        if (e.callee == "soft_eq") return true;
        if (is_oracle_callee(e.callee) && e.args.size() == 2 &&
            e.args[1]->kind == Expr::Kind::Name && e.args[1]->text == "bool")
          return true;
        return false;
      default:
        return false;
    }
  }

  void check_scope(const Expr& e, const std::set<std::string>& defined,
                   const std::set<std::string>& functions) {
    switch (e.kind) {
      case Expr::Kind::Name:
        if (!defined.count(e.text) && !functions.count(e.text) && !is_host_function(e.text))
          throw ParseError("undefined identifier '" + e.text + "'", e.line, e.col);
        return;
      case Expr::Kind::Call: {
        if (!functions.count(e.callee) && !is_host_function(e.callee))
          throw ParseError("call to undefined function '" + e.callee + "'", e.line, e.col);
        std::size_t first = 0;
        // the type argument of an oracle call is a type token, not a name read
        if (is_oracle_callee(e.callee) && e.args.size() == 2 &&
            e.args[1]->kind == Expr::Kind::Name &&
            kind_from_python_name(e.args[1]->text)) {
          check_scope(*e.args[0], defined, functions);
          return;
        }
        for (std::size_t i = first; i < e.args.size(); ++i)
          check_scope(*e.args[i], defined, functions);
        return;
      }
      case Expr::Kind::Unary:
        check_scope(*e.lhs, defined, functions);
        return;
      case Expr::Kind::Binary:
        check_scope(*e.lhs, defined, functions);
        check_scope(*e.rhs, defined, functions);
        return;
      default:
        return;
    }
  }

  void check_block(const std::vector<Stmt>& body, std::set<std::string>& defined,
                   const std::set<std::string>& functions) {
    for (const auto& s : body) {
      switch (s.kind) {
        case Stmt::Kind::Assign:
          check_scope(*s.value, defined, functions);
          defined.insert(s.target);
          break;
        case Stmt::Kind::Return:
        case Stmt::Kind::ExprStmt:
          check_scope(*s.value, defined, functions);
          break;
        case Stmt::Kind::If:
          for (const auto& arm : s.arms) {
            if (arm.condition) check_scope(*arm.condition, defined, functions);
            check_block(arm.body, defined, functions);
          }
          break;
      }
    }
  }

  void finalize(ProgramAst& ast) {
    int entries = 0;
    std::set<std::string> functions;
    for (const auto& fn : ast.functions) {
      if (!functions.insert(fn.name).second)
        throw ParseError("duplicate function '" + fn.name + "'", 1, 1);
      if (fn.name == "answer") ++entries;
    }
    if (entries != 1)
      throw ParseError("program must define exactly one entry function named 'answer'", 1, 1);
    for (const auto& fn : ast.functions) {
      std::set<std::string> defined;
      for (const auto& p : fn.params) defined.insert(p.name);
      check_block(fn.body, defined, functions);
    }
    if (ast.trailer) {
      if (ast.trailer->callee != "answer")
        throw ParseError("trailing invocation must call 'answer'", ast.trailer->line,
                         ast.trailer->col);
      std::set<std::string> empty;
      for (const auto& arg : ast.trailer->args) check_scope(*arg, empty, functions);
    }

    const FunctionDef& entry = ast.entry();
    if (entry.return_annotation) {
      ast.return_kind = (*entry.return_annotation == "bool") ? ReturnKind::Boolean
                                                             : ReturnKind::Number;
    } else {
      bool all_boolean = true;
      bool any_return = false;
      std::function<void(const std::vector<Stmt>&)> scan = [&](const std::vector<Stmt>& body) {
        for (const auto& s : body) {
          if (s.kind == Stmt::Kind::Return) {
            any_return = true;
            if (!boolean_shaped(*s.value)) all_boolean = false;
          } else if (s.kind == Stmt::Kind::If) {
            for (const auto& arm : s.arms) scan(arm.body);
          }
        }
      };
      scan(entry.body);
      if (!any_return) throw ParseError("entry function never returns", 1, 1);
      ast.return_kind = all_boolean ? ReturnKind::Boolean : ReturnKind::Number;
    }
  }

  const std::string& source_;
  Lexer lexer_;
  std::size_t pos_ = 0;
};

}  // namespace

const FunctionDef& ProgramAst::entry() const {
  for (const auto& fn : functions)
    if (fn.name == "answer") return fn;
  throw std::logic_error("program has no entry function");
}

bool is_oracle_callee(const std::string& name) { return name == "ask_llm" || name == "ask_gpt"; }

bool is_host_function(const std::string& name) {
  static const std::set<std::string> hosts = {"ask_llm", "ask_gpt", "soft_eq", "str", "int",
                                              "float",   "abs",     "min",     "max", "round"};
  return hosts.count(name) > 0;
}

ProgramAst parse_program(const std::string& source) {
  if (trim_copy(source).empty()) throw ParseError("empty source", 1, 1);
  return Parser(source).parse();
}

}  // namespace analog::dsl
