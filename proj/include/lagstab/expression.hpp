#ifndef LAGSTAB_EXPRESSION_HPP
#define LAGSTAB_EXPRESSION_HPP

#include "lagstab/jet.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lagstab {

// Scalar expression over named coordinates, evaluated in Jet3 arithmetic.
//
// Grammar (whitespace is ignored):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?            right associative
//   primary := number | 'pi' | 'e' | name | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | tan | log | exp | sqrt | bump
//
// Numbers use the usual decimal/exponent syntax. `bump(t)` is (1 - t^2)^4 for
// |t| < 1 and 0 otherwise. A power with a non-constant exponent is evaluated
// as exp(b log a).
class Expression {
public:
  struct Node;

  static Expression parse(std::string_view text,
                          const std::vector<std::string>& variables);

  // `coords` holds one seeded jet per variable, in declaration order.
  Jet3 evaluate(std::span<const Jet3> coords) const;

  const std::string& text() const { return text_; }

private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

} // namespace lagstab

#endif
