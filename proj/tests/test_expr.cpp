#include "expfit/expr.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace expfit;

TEST_SUITE_BEGIN("expr");

TEST_CASE("basic evaluation") {
    CHECK(Expression::parse("x+y")(1.0, 2.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(Expression::parse("exp(-2*sqrt(x^2+y^2))")(0.0, 0.0) == 1.0);
    CHECK(Expression::parse("4*exp(-2*sqrt(x^2+y^2))")(1.0, 0.0) ==
          doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-12));
    CHECK(Expression::parse("4*exp(-2*sqrt(x^2+y^2))")(1.0, 0.0) ==
          doctest::Approx(0.5413411329).epsilon(1e-9));
    CHECK(Expression::parse("0")(0.3, 0.7) == 0.0);
    CHECK(Expression::parse("x*y - y")(3.0, 2.0) == 4.0);
}

TEST_CASE("precedence and associativity") {
    CHECK(Expression::parse("2+3*4^2")(0.0, 0.0) == 50.0);
    CHECK(Expression::parse("2^3^2")(0.0, 0.0) == 512.0); // right-associative
    CHECK(Expression::parse("-2^2")(0.0, 0.0) == -4.0);   // ^ binds tighter than unary -
    CHECK(Expression::parse("2^-1")(0.0, 0.0) == 0.5);
    CHECK(Expression::parse("1-2-3")(0.0, 0.0) == -4.0);
    CHECK(Expression::parse("8/4/2")(0.0, 0.0) == 1.0);
    CHECK(Expression::parse("  x +\t y ")(1.0, 2.0) == 3.0); // whitespace-insensitive
    CHECK(Expression::parse("pi")(0.0, 0.0) == doctest::Approx(3.14159265358979).epsilon(1e-14));
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(Expression::parse("1/x")(0.0, 0.0), EvalDomainError);
    CHECK_THROWS_AS(Expression::parse("log(x)")(0.0, 0.0), EvalDomainError);
    CHECK_THROWS_AS(Expression::parse("log(x)")(-1.0, 0.0), EvalDomainError);
    CHECK_THROWS_AS(Expression::parse("sqrt(x)")(-1.0, 0.0), EvalDomainError);
    CHECK_THROWS_AS(Expression::parse("0^-1")(0.0, 0.0), EvalDomainError);
    // the error names the offending subexpression
    try {
        Expression::parse("1 + 1/x")(0.0, 0.0);
        CHECK(false);
    } catch (const EvalDomainError& e) {
        CHECK(e.subexpression() == "1/x");
    }
    // z needs a 3-vector
    CHECK_THROWS_AS(Expression::parse("z")(0.0, 0.0), EvalDomainError);
    CHECK(Expression::parse("z")(0.0, 0.0, 5.0) == 5.0);
}

TEST_CASE("parse errors carry 1-based columns") {
    try {
        Expression::parse("x + bar");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.column() == 5);
        CHECK(std::string(e.what()).find("bar") != std::string::npos);
    }
    try {
        Expression::parse("x + )");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.column() == 5);
    }
    CHECK_THROWS_AS(Expression::parse("(x"), ParseError);
    CHECK_THROWS_AS(Expression::parse("sin x"), ParseError);
    CHECK_THROWS_AS(Expression::parse(""), ParseError);
    CHECK_THROWS_AS(Expression::parse("x y"), ParseError);
}

namespace {

// random expression source text, kept inside safe domains
std::string random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 8);
    std::uniform_real_distribution<double> num(0.1, 3.0);
    switch (pick(rng)) {
    case 0: return std::to_string(num(rng));
    case 1: return "x";
    case 2: return "y";
    case 3: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
    case 4: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
    case 5: return "(" + random_expr(rng, depth - 1) + ")*(" + random_expr(rng, depth - 1) + ")";
    case 6: return "sin(" + random_expr(rng, depth - 1) + ")";
    case 7: return "cos(" + random_expr(rng, depth - 1) + ")";
    default: return "exp(-abs(" + random_expr(rng, depth - 1) + "))";
    }
}

} // namespace

TEST_CASE("additivity property over random subtrees") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::string sa = random_expr(rng, 3);
        const std::string sb = random_expr(rng, 3);
        const Expression a = Expression::parse(sa);
        const Expression b = Expression::parse(sb);
        const Expression sum = Expression::parse("(" + sa + ")+(" + sb + ")");
        const double x = coord(rng), y = coord(rng);
        const double lhs = sum(x, y);
        const double rhs = a(x, y) + b(x, y);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));
    }
}

TEST_CASE("print then reparse evaluates identically") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Expression e = Expression::parse(random_expr(rng, 4));
        const Expression round = Expression::parse(e.str());
        for (int k = 0; k < 5; ++k) {
            const double x = coord(rng), y = coord(rng);
            CHECK(e(x, y) == round(x, y)); // bit-identical
        }
    }
    // fixed cases exercising the precedence-aware printer
    for (const char* text : {"-2^2", "2^-1", "1-(2-3)", "8/(4/2)", "-(x+y)", "2*(x+y)^2",
                             "exp(-2*sqrt(x^2+y^2))", "x-y+z", "-x^2", "(x/2)^(y+1)"}) {
        const Expression e = Expression::parse(text);
        const Expression round = Expression::parse(e.str());
        CHECK(e(0.7, 0.3, 1.5) == round(0.7, 0.3, 1.5));
    }
}

TEST_CASE("evaluation is deterministic") {
    const Expression e = Expression::parse("exp(-2*sqrt(x^2+y^2)) + sin(pi*x)*cos(pi*y)");
    const double a = e(0.123456, 0.654321);
    const double b = e(0.123456, 0.654321);
    CHECK(a == b);
}

TEST_SUITE_END();
