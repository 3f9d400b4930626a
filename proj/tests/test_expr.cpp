#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "focsolve/expr.hpp"

using focsolve::diff_expr;
using focsolve::eval_expr;
using focsolve::expr_uses;
using focsolve::format_expr;
using focsolve::parse_expr;

namespace {

double eval_text(const std::string& text, double t = 0.0, double x = 0.0, double u = 0.0) {
    return eval_expr(parse_expr(text), t, x, u);
}

}  // namespace

TEST_CASE("arithmetic precedence and associativity") {
    CHECK(eval_text("2+3*4") == 14.0);
    CHECK(eval_text("(2+3)*4") == 20.0);
    CHECK(eval_text("2*3^2") == 18.0);
    CHECK(eval_text("2^3^2") == 512.0);  // right-associative power
    CHECK(eval_text("6/3/2") == 1.0);    // left-associative division
    CHECK(eval_text("2-3-4") == -5.0);
    CHECK(eval_text("-3^2", 0, 3, 0) == -9.0);  // unary minus binds looser than ^
    CHECK(eval_text("-x^2", 0, 3, 0) == -9.0);
    CHECK(eval_text("(-2)^2") == 4.0);
    CHECK(eval_text(" 1\t+ 2 ") == 3.0);
    CHECK(eval_text("2 - -3") == 5.0);
}

TEST_CASE("variables and functions evaluate") {
    CHECK(eval_text("t*x+u", 2.0, 3.0, 4.0) == 10.0);
    CHECK(eval_text("sin(t)", 0.5) == doctest::Approx(std::sin(0.5)).epsilon(1e-15));
    CHECK(eval_text("cos(t)", 0.5) == doctest::Approx(std::cos(0.5)).epsilon(1e-15));
    CHECK(eval_text("exp(t)", 0.5) == doctest::Approx(std::exp(0.5)).epsilon(1e-15));
    CHECK(eval_text("ln(t)", 2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(eval_text("sqrt(t)", 9.0) == 3.0);
    CHECK(eval_text("abs(0-t)", 2.5) == 2.5);
    // Gamma(2.5) = 0.75*sqrt(pi).
    CHECK(eval_text("gamma(2.5)") == doctest::Approx(1.3293403881791370).epsilon(1e-12));
}

TEST_CASE("parse errors carry the offending offset") {
    CHECK_THROWS_AS(parse_expr(""), focsolve::ParseError);
    try {
        parse_expr("x +");
        FAIL("expected ParseError");
    } catch (const focsolve::ParseError& e) {
        CHECK(e.offset == 3);
    }
    try {
        parse_expr("1 + zeta");
        FAIL("expected ParseError");
    } catch (const focsolve::ParseError& e) {
        CHECK(e.offset == 4);
    }
    CHECK_THROWS_AS(parse_expr("(1+2"), focsolve::ParseError);
    CHECK_THROWS_AS(parse_expr("sin()"), focsolve::ParseError);
    CHECK_THROWS_AS(parse_expr("1 2"), focsolve::ParseError);
    CHECK_THROWS_AS(parse_expr("foo(t)"), focsolve::ParseError);
    // `sign` exists only inside derivative trees, not in the input grammar.
    CHECK_THROWS_AS(parse_expr("sign(t)"), focsolve::ParseError);
}

TEST_CASE("evaluation rejects domain violations and non-finite results") {
    CHECK_THROWS_AS(eval_text("1/0"), focsolve::EvalError);
    CHECK_THROWS_AS(eval_text("x/(t-1)", 1.0, 2.0), focsolve::EvalError);
    CHECK_THROWS_AS(eval_text("ln(0)"), focsolve::EvalError);
    CHECK_THROWS_AS(eval_text("ln(0-2)"), focsolve::EvalError);
    CHECK_THROWS_AS(eval_text("sqrt(0-1)"), focsolve::EvalError);
    CHECK_THROWS_AS(eval_text("(0-1)^0.5"), focsolve::EvalError);
    CHECK_THROWS_AS(eval_text("gamma(0)"), focsolve::EvalError);
    CHECK_THROWS_AS(eval_text("gamma(0-2)"), focsolve::EvalError);
    CHECK_THROWS_AS(eval_text("exp(1000)"), focsolve::EvalError);  // overflow
    CHECK(eval_text("0/(1-t)", 0.5) == 0.0);  // 0/r is fine when r != 0
}

TEST_CASE("format then re-parse preserves values at random points") {
    const std::vector<std::string> samples = {
        "sin(t)*cos(x)+exp(u/4)-ln(1+t^2)",
        "sqrt(abs(x)+1)^1.5 + t*u",
        "(t+x)*(t-u)/(1+u^2)",
        "-(x+1)*(-t)",
        "gamma(t+2.5)/(x^2+1)",
        "2^(t/2) - x/3 + 0.125",
    };
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.05, 0.95);
    for (const std::string& text : samples) {
        CAPTURE(text);
        const focsolve::Expr e = parse_expr(text);
        const focsolve::Expr round = parse_expr(format_expr(e));
        for (int trial = 0; trial < 100; ++trial) {
            const double t = dist(rng), x = dist(rng), u = dist(rng);
            const double a = eval_expr(e, t, x, u);
            const double b = eval_expr(round, t, x, u);
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
}

TEST_CASE("symbolic derivatives match central finite differences") {
    const std::vector<std::string> samples = {
        "sin(x)*cos(u)+exp(x/4)",
        "x^3 - 2*x*u + u^2/(1+x^2)",
        "sqrt(x+2)*ln(u+3)",
        "abs(x)*u",
        "(u^2-4*x)^2",
    };
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(0.2, 0.9);
    const double h = 1e-6;
    for (const std::string& text : samples) {
        CAPTURE(text);
        const focsolve::Expr e = parse_expr(text);
        for (const char var : {'x', 'u'}) {
            const focsolve::Expr d = diff_expr(e, var);
            for (int trial = 0; trial < 20; ++trial) {
                const double t = dist(rng), x = dist(rng), u = dist(rng);
                const double xp = var == 'x' ? x + h : x, xm = var == 'x' ? x - h : x;
                const double up = var == 'u' ? u + h : u, um = var == 'u' ? u - h : u;
                const double fd = (eval_expr(e, t, xp, up) - eval_expr(e, t, xm, um)) / (2 * h);
                const double sym = eval_expr(d, t, x, u);
                CHECK(sym == doctest::Approx(fd).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("abs differentiates with the subgradient convention sign(0) = 0") {
    const focsolve::Expr d = diff_expr(parse_expr("abs(x)"), 'x');
    CHECK(eval_expr(d, 0.0, 2.0, 0.0) == 1.0);
    CHECK(eval_expr(d, 0.0, -2.0, 0.0) == -1.0);
    CHECK(eval_expr(d, 0.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("gamma differentiates only when its argument is constant in the variable") {
    const focsolve::Expr ok = diff_expr(parse_expr("gamma(2.5)+x"), 'x');
    CHECK(eval_expr(ok, 0.0, 1.0, 0.0) == 1.0);
    const focsolve::Expr in_t = diff_expr(parse_expr("gamma(t+1)*x"), 'x');
    CHECK(eval_expr(in_t, 1.0, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(diff_expr(parse_expr("gamma(x)"), 'x'), focsolve::DiffError);
}

TEST_CASE("expr_uses reports exactly the referenced variables") {
    const focsolve::Expr e = parse_expr("t*x + 1");
    CHECK(expr_uses(e, 't'));
    CHECK(expr_uses(e, 'x'));
    CHECK_FALSE(expr_uses(e, 'u'));
    CHECK_FALSE(expr_uses(parse_expr("1+2"), 't'));
}

TEST_CASE("constant subtrees fold unless evaluation would fail") {
    CHECK(format_expr(parse_expr("1+2")) == "3");
    CHECK(format_expr(parse_expr("2^10")) == "1024");
    // 1/0 must stay symbolic so the domain error surfaces at eval time.
    CHECK_THROWS_AS(eval_text("1/0"), focsolve::EvalError);
}
