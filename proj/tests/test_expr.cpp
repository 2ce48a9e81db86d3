#include <cmath>
#include <random>
#include <string>

#include "dcq/expr.hpp"
#include "doctest.h"

using namespace dcq;

namespace {

// Random well-formed input text. Every generated function is defined for
// t in [2, 40]: logs only wrap positive subtrees, exps only small ones.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  std::string number() {
    static const char* nums[] = {"2", "3", "0.5", "1.25", "7", "0.1", "10"};
    return nums[pick(7)];
  }
  // positive on [2, 40]
  std::string pos(int depth) {
    if (depth == 0) return pick(3) ? "t" : number();
    switch (pick(6)) {
      case 0: return pos(depth - 1) + " + " + pos(depth - 1);
      case 1: return pos(depth - 1) + "*" + pos(depth - 1);
      case 2: return "(" + pos(depth - 1) + ")^" + std::string(pick(2) ? "2" : "0.5");
      case 3: return "log(" + pos(depth - 1) + " + 2)";
      case 4: return "exp(0.01*" + pos(0) + ")";
      default: return "t^-1 + " + pos(depth - 1);
    }
  }
  // any sign
  std::string any(int depth) {
    switch (pick(4)) {
      case 0: return pos(depth) + " - " + pos(depth);
      case 1: return "-" + pos(depth);
      case 2: return "log(" + pos(depth) + ")*" + pos(depth);
      default: return pos(depth);
    }
  }
};

}  // namespace

TEST_CASE("parse: products and nested logs") {
  const Expr e = parse_weight("t*log(t)");
  CHECK(e.kind() == NodeKind::Product);
  REQUIRE(e.children().size() == 2);
  CHECK(e.child(0).kind() == NodeKind::Variable);
  CHECK(e.child(1).kind() == NodeKind::Log);
  CHECK(e.child(1).child(0).kind() == NodeKind::Variable);

  const Expr tilde = parse_weight("t*log(t) + t*log(log(log(t)))");
  REQUIRE(tilde.kind() == NodeKind::Sum);
  const Expr& inner = tilde.child(1).child(1);
  CHECK(inner.kind() == NodeKind::Log);
  CHECK(inner.child(0).kind() == NodeKind::Log);
  CHECK(inner.child(0).child(0).kind() == NodeKind::Log);
  CHECK(inner.child(0).child(0).child(0).kind() == NodeKind::Variable);
}

TEST_CASE("parse: errors carry the offset") {
  try {
    parse_weight("t*log(t");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 7);
    CHECK(std::string(e.what()).find("offset 7") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_weight(""), ParseError);
  CHECK_THROWS_AS(parse_weight("t +"), ParseError);
  CHECK_THROWS_AS(parse_weight("sin(t)"), ParseError);
  CHECK_THROWS_AS(parse_weight("t)"), ParseError);
  CHECK_THROWS_AS(parse_weight("t^t"), ParseError);
}

TEST_CASE("eval: closed-form values") {
  const Expr a = parse_weight("t*log(t)");
  CHECK(eval(a, 1.0) == 0.0);
  CHECK(eval(a, std::exp(1.0)) == doctest::Approx(2.718281828).epsilon(1e-9));

  const Expr b = parse_weight("t*log(t)+t*log(log(t))");
  const double ee = std::exp(std::exp(1.0));
  CHECK(eval(b, ee) == doctest::Approx(ee * (std::exp(1.0) + 1.0)).epsilon(1e-13));
}

TEST_CASE("eval: domain errors name the subexpression") {
  const Expr e = parse_weight("t*log(log(t))");
  try {
    eval(e, 0.5);
    FAIL("expected a domain error");
  } catch (const DomainError& err) {
    CHECK(err.subexpression() == "log(log(t))");
    CHECK(err.at() == 0.5);
  }
  CHECK_THROWS_AS(eval(parse_weight("(t - 3)^0.5"), 2.0), DomainError);
  CHECK_THROWS_AS(eval(parse_weight("t^-1"), 0.0), DomainError);
  CHECK(eval(parse_weight("(t - 3)^2"), 2.0) == 1.0);
}

TEST_CASE("differentiate: rules") {
  CHECK(to_string(differentiate(parse_weight("t*log(t)"))) == "log(t) + 1");
  const Expr d = differentiate(parse_weight("t*log(log(t))"));
  for (double t : {3.0, 10.0, 1e5}) CHECK(eval(d, t) == doctest::Approx(std::log(std::log(t)) + 1.0 / std::log(t)));
  CHECK(differentiate(parse_weight("7")).is_constant(0.0));
  CHECK(differentiate(parse_weight("t")).is_constant(1.0));
  const Expr e = differentiate(parse_weight("exp(2*t)"));
  CHECK(eval(e, 0.5) == doctest::Approx(2.0 * std::exp(1.0)));
}

TEST_CASE("serialize: canonical output") {
  CHECK(to_string(parse_weight("t*log(t) - 3*t")) == "t*log(t) - 3*t");
  CHECK(to_string(parse_weight("-t")) == "-t");
  CHECK(to_string(parse_weight("2 - t*log(t)")) == "2 - t*log(t)");
  CHECK(to_string(parse_weight("-(t + 1)")) == "-(t + 1)");
  CHECK(to_string(parse_weight("-2*t")) == "-2*t");
  CHECK(to_string(parse_weight("t^-1")) == "t^-1");
  CHECK(to_string(parse_weight("(t + 1)*t")) == "(t + 1)*t");
  CHECK(to_string(parse_weight("0.1*t")) == "0.1*t");
}

TEST_CASE("property: parse(serialize(e)) == e on a generated corpus") {
  Gen g(20241015);
  for (int i = 0; i < 500; ++i) {
    const std::string text = g.any(1 + i % 3);
    CAPTURE(text);
    const Expr e = parse_weight(text);
    const std::string s = to_string(e);
    CAPTURE(s);
    CHECK(parse_weight(s) == e);
    const Expr d = differentiate(e);
    CHECK(parse_weight(to_string(d)) == d);
  }
}

TEST_CASE("property: derivative matches a central difference") {
  Gen g(7);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ut(2.0, 40.0);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    const std::string text = g.any(1 + i % 3);
    const Expr e = parse_weight(text);
    const Expr d = differentiate(e);
    const double t = ut(rng);
    // Difference quotient in long double so rounding stays far below the tolerance.
    const long double h = static_cast<long double>(t) * 1e-6L;
    const long double lt = t;
    const long double fd = (eval(e, lt + h) - eval(e, lt - h)) / (2.0L * h);
    const double value = eval(d, t);
    CAPTURE(text);
    CAPTURE(t);
    CHECK(std::abs(value - static_cast<double>(fd)) <= 1e-6 * (1.0 + std::abs(value)));
    ++checked;
  }
  CHECK(checked == 400);
}

TEST_CASE("substitute: t -> 2t") {
  const Expr e = parse_weight("t*log(t)");
  const Expr s = substitute(e, parse_weight("2*t"));
  for (double t : {1.0, 3.5, 100.0}) CHECK(eval(s, t) == doctest::Approx(2 * t * std::log(2 * t)));
}
