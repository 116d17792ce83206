#include "pqlab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace pqlab {

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

enum class Op { Const, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Min, Max };

struct ExprNode {
  Op op = Op::Const;
  double value = 0.0;
  std::vector<std::shared_ptr<const ExprNode>> args;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0.0) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->value = value;
  n->args = std::move(args);
  return n;
}

double eval(const ExprNode& n, double x, double y) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::VarX: return x;
    case Op::VarY: return y;
    case Op::Neg: return -eval(*n.args[0], x, y);
    case Op::Add: return eval(*n.args[0], x, y) + eval(*n.args[1], x, y);
    case Op::Sub: return eval(*n.args[0], x, y) - eval(*n.args[1], x, y);
    case Op::Mul: return eval(*n.args[0], x, y) * eval(*n.args[1], x, y);
    case Op::Div: return eval(*n.args[0], x, y) / eval(*n.args[1], x, y);
    case Op::Pow: {
      double b = eval(*n.args[0], x, y);
      double e = eval(*n.args[1], x, y);
      if (e == 2.0) return b * b;
      return std::pow(b, e);
    }
    case Op::Exp: return std::exp(eval(*n.args[0], x, y));
    case Op::Log: return std::log(eval(*n.args[0], x, y));
    case Op::Min: return std::min(eval(*n.args[0], x, y), eval(*n.args[1], x, y));
    case Op::Max: return std::max(eval(*n.args[0], x, y), eval(*n.args[1], x, y));
  }
  return 0.0;
}

bool constant(const ExprNode& n) {
  if (n.op == Op::VarX || n.op == Op::VarY) return false;
  for (const auto& a : n.args)
    if (!constant(*a)) return false;
  return true;
}

class Parser {
 public:
  Parser(std::string_view s, int line, int column) : s_(s), line_(line), col0_(column) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, col0_ + static_cast<int>(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Op::Add, {lhs, term()});
      else if (accept('-'))
        lhs = make(Op::Sub, {lhs, term()});
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Op::Mul, {lhs, unary()});
      else if (accept('/'))
        lhs = make(Op::Div, {lhs, unary()});
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, {unary()});
    if (accept('+')) return unary();
    NodePtr base = primary();
    if (accept('^')) return make(Op::Pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (ec != std::errc()) fail("malformed number");
      pos_ = static_cast<size_t>(ptr - s_.data());
      return make(Op::Const, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (name == "x") return make(Op::VarX);
      if (name == "y") return make(Op::VarY);
      Op op;
      int arity;
      if (name == "exp") {
        op = Op::Exp;
        arity = 1;
      } else if (name == "log") {
        op = Op::Log;
        arity = 1;
      } else if (name == "min") {
        op = Op::Min;
        arity = 2;
      } else if (name == "max") {
        op = Op::Max;
        arity = 2;
      } else {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      expect('(');
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      if (static_cast<int>(args.size()) != arity) fail(name + " expects " + std::to_string(arity) + " argument(s)");
      expect(')');
      return make(op, std::move(args));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  int line_;
  int col0_;
  size_t pos_ = 0;
};

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double constant) : root_(make(Op::Const, {}, constant)) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, constant);
  text_.assign(buf, ptr);
}

Expr Expr::parse(std::string_view text, int line, int column) {
  Expr e;
  e.root_ = Parser(text, line, column).parse();
  e.text_ = std::string(text);
  return e;
}

double Expr::operator()(double x, double y) const { return eval(*root_, x, y); }

bool Expr::is_constant() const { return constant(*root_); }

}  // namespace pqlab
