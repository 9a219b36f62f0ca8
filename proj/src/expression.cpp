#include "lagstab/expression.hpp"

#include "lagstab/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace lagstab {

struct Expression::Node {
  enum class Kind { constant, variable, negate, add, sub, mul, div, pow, call };
  enum class Func { sin, cos, tan, log, exp, sqrt, bump };

  Kind kind = Kind::constant;
  double constant = 0.0;
  int variable = -1;
  Func func = Func::sin;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

class Parser {
public:
  Parser(std::string_view text, const std::vector<std::string>& variables)
      : text_(text), variables_(variables) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != text_.size()) error("unexpected trailing input");
    return root;
  }

private:
  [[noreturn]] void error(const std::string& what) const {
    throw Error(ErrorCode::config, "expression '" + std::string(text_) +
                                       "': " + what + " at offset " +
                                       std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(Node::Kind kind, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }

  static NodePtr constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::constant;
    n->constant = value;
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = binary(Node::Kind::add, lhs, term());
      else if (accept('-'))
        lhs = binary(Node::Kind::sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = binary(Node::Kind::mul, lhs, unary());
      else if (accept('/'))
        lhs = binary(Node::Kind::div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::negate;
      n->lhs = unary();
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary(Node::Kind::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) error("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr inner = expr();
      if (!accept(')')) error("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    error(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    double value = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc()) error("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return constant(value);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    const std::string id(text_.substr(start, pos_ - start));

    for (std::size_t i = 0; i < variables_.size(); ++i)
      if (variables_[i] == id) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::variable;
        n->variable = static_cast<int>(i);
        return n;
      }

    static const std::pair<const char*, Node::Func> functions[] = {
        {"sin", Node::Func::sin},   {"cos", Node::Func::cos},
        {"tan", Node::Func::tan},   {"log", Node::Func::log},
        {"exp", Node::Func::exp},   {"sqrt", Node::Func::sqrt},
        {"bump", Node::Func::bump},
    };
    for (const auto& [fname, func] : functions)
      if (id == fname) {
        if (!accept('(')) error("expected '(' after " + id);
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::call;
        n->func = func;
        n->lhs = expr();
        if (!accept(')')) error("expected ')'");
        return n;
      }

    if (id == "pi") return constant(std::numbers::pi);
    if (id == "e") return constant(std::numbers::e);
    error("unknown identifier '" + id + "'");
  }

  std::string_view text_;
  const std::vector<std::string>& variables_;
  std::size_t pos_ = 0;
};

Jet3 eval(const Node& n, std::span<const Jet3> coords) {
  const int dim = coords.empty() ? 0 : coords.front().dim;
  switch (n.kind) {
  case Node::Kind::constant: return Jet3::constant(dim, n.constant);
  case Node::Kind::variable: return coords[static_cast<std::size_t>(n.variable)];
  case Node::Kind::negate: return -eval(*n.lhs, coords);
  case Node::Kind::add: return eval(*n.lhs, coords) + eval(*n.rhs, coords);
  case Node::Kind::sub: return eval(*n.lhs, coords) - eval(*n.rhs, coords);
  case Node::Kind::mul: return eval(*n.lhs, coords) * eval(*n.rhs, coords);
  case Node::Kind::div: return eval(*n.lhs, coords) / eval(*n.rhs, coords);
  case Node::Kind::pow:
    if (n.rhs->kind == Node::Kind::constant)
      return pow(eval(*n.lhs, coords), n.rhs->constant);
    return pow(eval(*n.lhs, coords), eval(*n.rhs, coords));
  case Node::Kind::call: {
    const Jet3 a = eval(*n.lhs, coords);
    switch (n.func) {
    case Node::Func::sin: return sin(a);
    case Node::Func::cos: return cos(a);
    case Node::Func::tan: return tan(a);
    case Node::Func::log: return log(a);
    case Node::Func::exp: return exp(a);
    case Node::Func::sqrt: return sqrt(a);
    case Node::Func::bump: return bump(a);
    }
  }
  }
  return Jet3::constant(dim, 0.0);
}

} // namespace

Expression Expression::parse(std::string_view text,
                             const std::vector<std::string>& variables) {
  if (variables.size() > static_cast<std::size_t>(kMaxDim))
    throw Error(ErrorCode::config, "too many expression variables");
  Expression e;
  e.text_ = std::string(text);
  e.root_ = Parser(text, variables).parse();
  return e;
}

Jet3 Expression::evaluate(std::span<const Jet3> coords) const {
  return eval(*root_, coords);
}

} // namespace lagstab
