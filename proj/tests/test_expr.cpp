#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hpa/expr.hpp"

using namespace hpa;

namespace {

int parse_column(const std::string& text) {
    try {
        Expr::parse(text);
    } catch (const ExprParseError& e) {
        return e.column;
    }
    return -1;
}

} // namespace

TEST(Expr, SmallExamples) {
    EXPECT_DOUBLE_EQ(Expr::parse("abs(x) + y^2")(1, 2), 5.0);
    EXPECT_DOUBLE_EQ(Expr::parse("exp(x)*cos(y)")(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(Expr::parse("sqrt(x*x + y*y)")(3, 4), 5.0);
    EXPECT_DOUBLE_EQ(Expr::parse("log(exp(t))")(0, 0, 0, 2.5), 2.5);
    EXPECT_NEAR(Expr::parse("sin(pi/2) + z")(0, 0, 3), 4.0, 1e-15);
    EXPECT_DOUBLE_EQ(Expr::parse("1.5e2 + .5")(0, 0), 150.5);
}

TEST(Expr, PrecedenceAndAssociativity) {
    EXPECT_DOUBLE_EQ(Expr::parse("1 + 2 * 3")(0, 0), 7.0);
    EXPECT_DOUBLE_EQ(Expr::parse("8 / 4 / 2")(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(Expr::parse("5 - 3 - 1")(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(Expr::parse("2 ^ 3 ^ 2")(0, 0), 512.0);
    // Unary minus binds looser than ^.
    EXPECT_DOUBLE_EQ(Expr::parse("-x^2")(3, 0), -9.0);
    EXPECT_DOUBLE_EQ(Expr::parse("(-x)^2")(3, 0), 9.0);
    EXPECT_DOUBLE_EQ(Expr::parse("2^-1")(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(Expr::parse("--x")(3, 0), 3.0);
    EXPECT_DOUBLE_EQ(Expr::parse("2 * -y")(0, 4), -8.0);
}

TEST(Expr, PrintParseRoundTrip) {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-2, 2);
    for (const char* text : {"abs(x) + y^2", "-x^2 - 3*y/(1 + x*x)", "2^3^2", "exp(-t^2) * cos(3*t)",
                             "0.1 + 1/3 - 7e-300", "sqrt(abs(x - y)) * -(z)"}) {
        const auto e = Expr::parse(text);
        const auto p = e.print();
        const auto e2 = Expr::parse(p);
        EXPECT_EQ(e2.print(), p) << text;
        for (int i = 0; i < 20; ++i) {
            const ExprVars v{u(rng), u(rng), u(rng), u(rng)};
            const double a = e.eval(v), b = e2.eval(v);
            if (std::isnan(a)) EXPECT_TRUE(std::isnan(b));
            else EXPECT_EQ(a, b) << text;
        }
    }
}

TEST(Expr, VariableUse) {
    const auto e = Expr::parse("x + 2*t");
    EXPECT_TRUE(e.uses('x'));
    EXPECT_TRUE(e.uses('t'));
    EXPECT_FALSE(e.uses('y'));
    EXPECT_FALSE(Expr::parse("pi").uses('x'));
}

TEST(Expr, DomainErrorsAreEvaluationErrors) {
    const auto e = Expr::parse("1/(x-x)");
    EXPECT_THROW(e(0.3, 0), NumericError);
    try {
        e(1, 1);
        FAIL();
    } catch (const NumericError& err) {
        EXPECT_NE(std::string(err.what()).find("column 2"), std::string::npos) << err.what();
    }
    EXPECT_THROW(Expr::parse("sqrt(x)")(-1, 0), NumericError);
    EXPECT_THROW(Expr::parse("log(y)")(0, 0), NumericError);
    EXPECT_THROW(Expr::parse("x^0.5")(-1, 0), NumericError);
    EXPECT_THROW(Expr::parse("x^-1")(0, 0), NumericError);
    EXPECT_DOUBLE_EQ(Expr::parse("x^3")(-2, 0), -8.0);
}

TEST(Expr, ParseErrorsCarryColumns) {
    EXPECT_EQ(parse_column("x + "), 5);
    EXPECT_EQ(parse_column("x + w"), 5);
    EXPECT_EQ(parse_column("foo(x)"), 1);
    EXPECT_EQ(parse_column("(x + 1"), 7);
    EXPECT_EQ(parse_column("x y"), 3);
    EXPECT_EQ(parse_column("exp x"), 5);
    EXPECT_EQ(parse_column("2 $ 3"), 3);
    EXPECT_EQ(parse_column(""), 1);
    EXPECT_THROW(Expr::parse("x + "), PreconditionError);
}
