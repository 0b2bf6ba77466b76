#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "folijet/dual.hpp"
#include "folijet/expr.hpp"
#include "folijet/series.hpp"
#include "folijet/taylor.hpp"

using namespace folijet;
using K = ExprNode::Kind;

namespace {

// Random well-defined expressions in x1, x2 (arguments of log/sqrt kept positive).
std::string random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 11);
  std::uniform_real_distribution<double> num(0.1, 3.0);
  auto sub = [&] { return random_expr(rng, depth - 1); };
  switch (pick(rng)) {
    case 0: return "x1";
    case 1: return "x2";
    case 2: return std::to_string(num(rng)).substr(0, 5);
    case 3: return "(" + sub() + " + " + sub() + ")";
    case 4: return "(" + sub() + " - " + sub() + ")";
    case 5: return "(" + sub() + " * " + sub() + ")";
    case 6: return "(" + sub() + ") / (1.5 + (" + sub() + ")^2)";
    case 7: return "sin(" + sub() + ")";
    case 8: return "exp(0.3 * " + sub() + ")";
    case 9: return "log(1 + (" + sub() + ")^2)";
    case 10: return "atan(" + sub() + ")^3";
    default: return "-" + sub();
  }
}

}  // namespace

TEST_CASE("parse sin(x1)^2 + 1") {
  auto p = parse("sin(x1)^2 + 1");
  const auto& root = p.node(p.root());
  REQUIRE(root.kind == K::add);
  const auto& pw = p.node(root.a);
  REQUIRE(pw.kind == K::pow);
  CHECK(p.node(pw.a).kind == K::call);
  CHECK(p.node(pw.a).func == Func::sin);
  CHECK(p.node(p.node(pw.a).a).name == "x1");
  CHECK(p.node(pw.b).value == 2.0);
  CHECK(p.node(root.b).value == 1.0);
  CHECK(p.print() == "((sin(x1)^2) + 1)");
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse("x1 * (");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 7);
    CHECK(!e.expected().empty());
  }
  try {
    parse("x1 +\n  * 2");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  CHECK_THROWS_AS(parse("x1 2"), SyntaxError);
  CHECK_THROWS_AS(parse("(x1"), SyntaxError);
  CHECK_THROWS_AS(parse("x1)"), SyntaxError);
  CHECK_THROWS_AS(parse("x1 # 2"), SyntaxError);
  CHECK_THROWS_AS(parse("sinh(x1)"), UnknownFunction);
  CHECK_THROWS_AS(parse("sin + 1"), SyntaxError);
  CHECK_THROWS_AS(parse(""), SyntaxError);
}

TEST_CASE("free variables") {
  CHECK(free_variables(parse("y2_1 - 3*y1_1^2")) == std::set<std::string>{"y1_1", "y2_1"});
  CHECK(free_variables(parse("x1*y1_2")) == std::set<std::string>{"x1", "y1_2"});
  CHECK(free_variables(parse("3.5")).empty());
  CHECK(free_variables(parse("u1 + x1")) == std::set<std::string>{"u1", "x1"});
  CHECK(free_variables(parse("pi * e + 2e-3")).empty());
}

TEST_CASE("precedence") {
  // unary minus binds tighter than ^
  CHECK(eval<double>(parse("-2^2"), {}) == 4.0);
  CHECK(eval<double>(parse("2^3^2"), {}) == 512.0);
  CHECK(eval<double>(parse("1 - 2 - 3"), {}) == -4.0);
  CHECK(eval<double>(parse("8 / 4 / 2"), {}) == 1.0);
  CHECK(eval<double>(parse("2 + 3 * 4 ^ 2"), {}) == 50.0);
  CHECK(eval<double>(parse("2^-1"), {}) == 0.5);
  CHECK(eval<double>(parse("1.5e1 + .5"), {}) == 15.5);
}

TEST_CASE("variable names") {
  auto y = VariableName::parse("y12_3");
  REQUIRE(y);
  CHECK(y->kind == VariableName::Kind::jet);
  CHECK(y->order == 12);
  CHECK(y->index == 3);
  CHECK(VariableName::parse("p_2")->kind == VariableName::Kind::momentum);
  CHECK(VariableName::parse("u1")->kind == VariableName::Kind::leaf);
  CHECK(VariableName::parse("x4")->str() == "x4");
  for (const char* bad : {"x0", "x", "y1", "y_1", "y0_1", "p1", "z1", "x01", "y1_", "xx1"})
    CHECK_MESSAGE(!VariableName::parse(bad), bad);

  VariableContext ctx;
  ctx.transverse_dim = 2;
  ctx.jet_order = 1;
  CHECK_NOTHROW(parse("x1 + y1_2").check_variables(ctx));
  CHECK_THROWS_AS(parse("x3").check_variables(ctx), UnknownVariable);
  CHECK_THROWS_AS(parse("y2_1").check_variables(ctx), UnknownVariable);
  CHECK_THROWS_AS(parse("foo").check_variables(ctx), UnknownVariable);
  CHECK_THROWS_AS(parse("p_1").check_variables(ctx), UnknownVariable);
}

TEST_CASE("eval examples") {
  std::map<std::string, TaylorScalar> env{{"x1", TaylorScalar({1, 1, 0, 0})}};
  auto c = eval(parse("x1^3"), env);
  CHECK(c.coeffs() == std::vector<double>{1, 3, 3, 1});
  CHECK(eval<double>(parse("x1 + x2"), {{"x1", 2.0}, {"x2", 3.0}}) == 5.0);
  CHECK_THROWS_AS(eval<double>(parse("log(x1)"), {{"x1", -1.0}}), DomainError);
  CHECK_THROWS_AS(eval<double>(parse("x1 + x2"), {{"x1", 1.0}}), UnboundVariable);
  CHECK_THROWS_AS(eval<double>(parse("x1^0.5"), {{"x1", -1.0}}), DomainError);
  CHECK_THROWS_AS(eval<double>(parse("x1 / 0"), {{"x1", 1.0}}), DomainError);
  CHECK(eval<double>(parse("x1^3"), {{"x1", -2.0}}) == -8.0);
  CHECK(eval<double>(parse("x1^x2"), {{"x1", 2.0}, {"x2", 3.0}}) == doctest::Approx(8.0));
  CHECK_THROWS_AS(eval<double>(parse("x1^x2"), {{"x1", -2.0}, {"x2", 3.0}}), DomainError);
  // constant program with a shape prototype
  TaylorScalar proto({0, 0, 0});
  auto k = eval<TaylorScalar>(parse("2*pi"), {}, &proto);
  CHECK(k.order() == 2);
  CHECK(k[0] == doctest::Approx(2 * M_PI));
}

TEST_CASE("property: parse-print-parse idempotence") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    auto p = parse(random_expr(rng, 4));
    auto q = parse(p.print());
    CHECK(structurally_equal(p, q));
    CHECK(q.print() == p.print());
  }
}

TEST_CASE("property: scalar kinds agree on values") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  auto table = MonomialTable::get(2, 2);
  for (int i = 0; i < 200; ++i) {
    auto p = parse(random_expr(rng, 4));
    const double a = U(rng), b = U(rng);
    const double r = eval<double>(p, {{"x1", a}, {"x2", b}});
    auto t = eval<TaylorScalar>(p, {{"x1", TaylorScalar({a})}, {"x2", TaylorScalar({b})}});
    auto d = eval<DualQuadScalar>(p, {{"x1", seed_variable(0, a, 2)}, {"x2", seed_variable(1, b, 2)}});
    auto s = eval<PowerSeries>(
        p, {{"x1", PowerSeries::variable(table, 0, a)}, {"x2", PowerSeries::variable(table, 1, b)}});
    const double tol = 1e-14 * std::max(1.0, std::fabs(r));
    CHECK(std::fabs(t[0] - r) <= tol);
    CHECK(std::fabs(d.value() - r) <= tol);
    CHECK(std::fabs(s.constant_term() - r) <= 1e-12 * std::max(1.0, std::fabs(r)));
    // the series gradient agrees with the dual gradient
    CHECK(std::fabs(s.linear(0) - d.grad(0)) <= 1e-10 * std::max(1.0, std::fabs(d.grad(0))));
    CHECK(std::fabs(s.second(0, 1) - d.hess(0, 1)) <= 1e-9 * std::max(1.0, std::fabs(d.hess(0, 1))));
  }
}

TEST_CASE("bound programs match named evaluation") {
  auto p = parse("x2 * sin(x1) + 3");
  BoundProgram b(p, {"x1", "x2"});
  CHECK(b(std::vector<double>{0.5, 2.0}) == eval<double>(p, {{"x1", 0.5}, {"x2", 2.0}}));
  CHECK_THROWS_AS(BoundProgram(p, {"x1"}), UnboundVariable);
  BoundProgram c(parse("7"), {"x1"});
  CHECK(c(std::vector<double>{1.0}) == 7.0);
}
