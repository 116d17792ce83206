#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pqlab {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ExprNode;

// Closed-form scalar expression in the variables x and y.
class Expr {
 public:
  Expr();
  explicit Expr(double constant);
  static Expr parse(std::string_view text, int line = 1, int column = 1);

  double operator()(double x, double y) const;
  bool is_constant() const;
  const std::string& text() const { return text_; }

 private:
  std::shared_ptr<const ExprNode> root_;
  std::string text_;
};

}  // namespace pqlab
