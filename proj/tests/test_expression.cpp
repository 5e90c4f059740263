#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fpcs/expression.hpp"

namespace fpcs {
namespace {

double eval(const char* src, std::vector<double> x = {0.0, 0.0, 0.0}) {
  return Expression::parse(src, static_cast<int>(x.size()))(x);
}

TEST(Expression, Arithmetic) {
  EXPECT_DOUBLE_EQ(eval("1 + 2 * 3"), 7.0);
  EXPECT_DOUBLE_EQ(eval("(1 + 2) * 3"), 9.0);
  EXPECT_DOUBLE_EQ(eval("8 / 4 / 2"), 1.0);
  EXPECT_DOUBLE_EQ(eval("10 - 4 - 3"), 3.0);
  EXPECT_DOUBLE_EQ(eval("1.5e2 + .5"), 150.5);
}

TEST(Expression, PowerBindsTighterThanUnaryMinus) {
  EXPECT_DOUBLE_EQ(eval("-2^2"), -4.0);
  EXPECT_DOUBLE_EQ(eval("(-2)^2"), 4.0);
  EXPECT_DOUBLE_EQ(eval("2^3^2"), 512.0);
  EXPECT_DOUBLE_EQ(eval("2^-1"), 0.5);
  EXPECT_DOUBLE_EQ(eval("--3"), 3.0);
  EXPECT_DOUBLE_EQ(eval("+3"), 3.0);
}

TEST(Expression, FunctionsConstantsAndVariables) {
  EXPECT_NEAR(eval("sin(pi / 2) + cos(0)"), 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(eval("sqrt(16) + abs(-3) + exp(0)"), 8.0);
  EXPECT_DOUBLE_EQ(eval("e"), std::numbers::e);
  EXPECT_DOUBLE_EQ(eval("x1 * x2 - x3", {2.0, 5.0, 1.0}), 9.0);
}

TEST(Expression, MatchesBuiltinRastriginForm) {
  const Expression f = Expression::parse("x1^2 - 10*cos(2*pi*x1) + x2^2 - 10*cos(2*pi*x2)", 2);
  for (double a : {-1.7, -0.2, 0.0, 0.9}) {
    for (double b : {-1.1, 0.3, 1.95}) {
      const std::array<double, 2> x{a, b};
      const double expected = a * a - 10 * std::cos(2 * std::numbers::pi * a) + b * b - 10 * std::cos(2 * std::numbers::pi * b);
      EXPECT_NEAR(f(x), expected, 1e-12);
    }
  }
}

TEST(Expression, Errors) {
  EXPECT_THROW(Expression::parse("", 2), ExpressionError);
  EXPECT_THROW(Expression::parse("1 +", 2), ExpressionError);
  EXPECT_THROW(Expression::parse("(1 + 2", 2), ExpressionError);
  EXPECT_THROW(Expression::parse("1 2", 2), ExpressionError);
  EXPECT_THROW(Expression::parse("x3", 2), ExpressionError);
  EXPECT_THROW(Expression::parse("tan(x1)", 2), ExpressionError);
  EXPECT_THROW(Expression::parse("sin x1", 2), ExpressionError);
  EXPECT_THROW(Expression::parse("x1 # 2", 2), ExpressionError);
  EXPECT_THROW(Expression::parse("x1", 0), ParameterError);
  EXPECT_THROW(Expression::parse("x1", 10), ParameterError);
}

TEST(Expression, ErrorMessageNamesColumn) {
  try {
    Expression::parse("x1 + foo", 2);
    FAIL() << "expected an error";
  } catch (const ExpressionError& e) {
    EXPECT_NE(std::string(e.what()).find("column 6"), std::string::npos) << e.what();
  }
}

TEST(Expression, DeepNestingIsRejected) {
  std::string deep;
  for (int i = 0; i < 70; ++i) deep += "1+(";
  deep += "1";
  for (int i = 0; i < 70; ++i) deep += ")";
  EXPECT_THROW(Expression::parse(deep, 1), ExpressionError);
}

}  // namespace
}  // namespace fpcs
