#pragma once

#include <memory>
#include <string>

namespace bifluid {

/// A parsed formula in x. Grammar:
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := ('+' | '-') unary | power
///   power  := atom ('^' unary)?
///   atom   := number | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
///   func   := 'sin' | 'cos' | 'exp'
/// Throws Error(ParseError) with the offending column.
class Expression {
 public:
  struct Node;

  static Expression parse(const std::string& text);

  double operator()(double x) const;
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace bifluid
