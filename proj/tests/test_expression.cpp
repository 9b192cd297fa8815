#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "slreg/expression.hpp"

using slreg::Expression;
using slreg::ExprParseError;

TEST_CASE("Polynomials parse and evaluate") {
    const Expression e = Expression::parse("x^2 + 3*x - 1");
    REQUIRE(e(2.0) == Catch::Approx(9.0));
    REQUIRE(e(-1.0) == Catch::Approx(-3.0));
}

TEST_CASE("Unary functions and nesting") {
    const Expression e = Expression::parse("exp(-x^2) * cos(x) + sqrt(abs(x)) - log(1 + x^2)");
    const double x = 0.7;
    const double expect = std::exp(-x * x) * std::cos(x) + std::sqrt(x) - std::log(1 + x * x);
    REQUIRE(e(x) == Catch::Approx(expect).epsilon(1e-14));
    REQUIRE(Expression::parse("sin(x)/x")(1e-1) == Catch::Approx(std::sin(0.1) / 0.1));
}

TEST_CASE("Scientific notation and precedence") {
    REQUIRE(Expression::parse("1e-3 + 2.5E2")(0.0) == Catch::Approx(250.001));
    REQUIRE(Expression::parse("2 + 3 * 4 ^ 2")(0.0) == Catch::Approx(50.0));
    // Right-associative exponentiation: 2^(3^2) = 512.
    REQUIRE(Expression::parse("2 ^ 3 ^ 2")(0.0) == Catch::Approx(512.0));
    REQUIRE(Expression::parse("-x^2")(3.0) == Catch::Approx(-9.0));
    REQUIRE(Expression::parse("(1 - x)^3 * (1 + x)^2")(0.5) == Catch::Approx(0.125 * 2.25));
}

TEST_CASE("Symbolic derivatives are exact") {
    const Expression cubed = Expression::parse("x^3").derivative();
    REQUIRE(cubed(2.0) == Catch::Approx(12.0));

    const Expression gauss = Expression::parse("exp(-x^2)").derivative();
    REQUIRE(gauss(0.5) == Catch::Approx(-2 * 0.5 * std::exp(-0.25)).epsilon(1e-14));

    // General-power chain rule through exp(g log f): d/dx x^x = x^x (log x + 1).
    const Expression selfpow = Expression::parse("x^x").derivative();
    const double x = 1.3;
    REQUIRE(selfpow(x) == Catch::Approx(std::pow(x, x) * (std::log(x) + 1)).epsilon(1e-12));

    const Expression mixed = Expression::parse("x * log(x) - sqrt(x)").derivative();
    REQUIRE(mixed(4.0) == Catch::Approx(std::log(4.0) + 1 - 0.25 / 1.0).epsilon(1e-13));

    // Second derivative through the chain.
    const Expression sin2 = Expression::parse("sin(2*x)").derivative().derivative();
    REQUIRE(sin2(0.3) == Catch::Approx(-4 * std::sin(0.6)).epsilon(1e-13));
}

TEST_CASE("Constant folding collapses numeric subtrees") {
    const Expression c = Expression::parse("2*3 + 1");
    REQUIRE(c(123.0) == Catch::Approx(7.0));
    REQUIRE(c.canonical() == "7");
}

TEST_CASE("Parse errors carry position and offending token") {
    try {
        Expression::parse("x + * 2");
        FAIL("expected a parse error");
    } catch (const ExprParseError& err) {
        REQUIRE(err.position == 4);
        REQUIRE(err.token == "*");
    }
    REQUIRE_THROWS_AS(Expression::parse("frob(x)"), ExprParseError);
    REQUIRE_THROWS_AS(Expression::parse("(x + 1"), ExprParseError);
    REQUIRE_THROWS_AS(Expression::parse(""), ExprParseError);
}

TEST_CASE("Canonical form reparses to the same function") {
    const Expression e = Expression::parse("exp(-x) * (1 - x)^2 / (2 + cos(x))");
    const Expression r = Expression::parse(e.canonical());
    for (double x : {-0.9, 0.0, 0.4, 2.5}) REQUIRE(r(x) == Catch::Approx(e(x)).epsilon(1e-14));
}
