#include "lagstab/error.hpp"
#include "lagstab/expression.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

using namespace lagstab;

namespace {

Jet3 eval(const char* text, double x = 0.0, double y = 0.0) {
  const auto e = Expression::parse(text, {"x", "y"});
  const std::array<Jet3, 2> c{Jet3::variable(2, 0, x), Jet3::variable(2, 1, y)};
  return e.evaluate(c);
}

ErrorCode parse_error(const char* text) {
  try {
    (void)Expression::parse(text, {"x", "y"});
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::invalid_argument;
}

} // namespace

TEST_CASE("precedence and associativity") {
  CHECK(eval("1 + 2 * 3").value == 7.0);
  CHECK(eval("(1 + 2) * 3").value == 9.0);
  CHECK(eval("2 ^ 3 ^ 2").value == 512.0);
  CHECK(eval("-2 ^ 2").value == -4.0);
  CHECK(eval("8 / 4 / 2").value == 1.0);
  CHECK(eval("1 - 2 - 3").value == -4.0);
  CHECK(eval("2e-3 * 1E3").value == doctest::Approx(2.0));
  CHECK(eval("pi").value == std::numbers::pi);
  CHECK(eval("e").value == std::numbers::e);
}

TEST_CASE("function vocabulary matches the library with exact derivatives") {
  const double x = 0.3, y = 0.8;
  const Jet3 f = eval("-log(cos(x)) + exp(y) * sqrt(x + 1) / tan(y) + sin(x*y)^2", x, y);
  const double expected = -std::log(std::cos(x)) + std::exp(y) * std::sqrt(x + 1) / std::tan(y) +
                          std::pow(std::sin(x * y), 2);
  CHECK(f.value == doctest::Approx(expected).epsilon(1e-14));
  // d/dx of -log cos x is tan x; the second term contributes exp(y)/(2 sqrt(x+1) tan y)
  const double dfdx = std::tan(x) + std::exp(y) / (2 * std::sqrt(x + 1) * std::tan(y)) +
                      2 * std::sin(x * y) * std::cos(x * y) * y;
  CHECK(f.first[0] == doctest::Approx(dfdx).epsilon(1e-13));
}

TEST_CASE("bump in expressions") {
  CHECK(eval("bump(x)", 0.5).value == doctest::Approx(std::pow(0.75, 4)));
  CHECK(eval("bump(x)", 1.5).value == 0.0);
}

TEST_CASE("variable exponent is exp(b log a)") {
  const Jet3 f = eval("x ^ y", 1.7, 0.6);
  CHECK(f.value == doctest::Approx(std::pow(1.7, 0.6)));
  CHECK(f.first[1] == doctest::Approx(std::pow(1.7, 0.6) * std::log(1.7)));
}

TEST_CASE("malformed expressions are configuration errors") {
  CHECK(parse_error("x +") == ErrorCode::config);
  CHECK(parse_error("(x + y") == ErrorCode::config);
  CHECK(parse_error("z * 2") == ErrorCode::config);
  CHECK(parse_error("foo(x)") == ErrorCode::config);
  CHECK(parse_error("x y") == ErrorCode::config);
  CHECK(parse_error("") == ErrorCode::config);
  CHECK(parse_error("1.2.3") == ErrorCode::config);
}

TEST_CASE("evaluation errors surface at evaluation time") {
  CHECK_THROWS_AS(eval("log(x)", -1.0), Error);
}
