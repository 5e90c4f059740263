#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fpcs/engine.hpp"
#include "fpcs/schedule.hpp"
#include "oracles.hpp"

namespace fpcs {
namespace {

TEST(Chebyshev, KnownValues) {
  EXPECT_NEAR(chebyshev_t(3, 0.5), -1.0, 1e-15);
  for (double order : {0.0, 0.25, 1.0, 3.0, 7.5}) EXPECT_DOUBLE_EQ(chebyshev_t(order, 1.0), 1.0);
  EXPECT_NEAR(chebyshev_t(2, 2.0), 7.0, 1e-13);
  EXPECT_NEAR(chebyshev_t(3, -2.0), 4 * -8.0 - 3 * -2.0, 1e-12);
  EXPECT_NEAR(chebyshev_t(2, -2.0), 7.0, 1e-12);
}

TEST(Chebyshev, NegativeArgumentNeedsIntegerOrder) {
  EXPECT_THROW(chebyshev_t(0.5, -1.5), DomainError);
  EXPECT_NO_THROW(chebyshev_t(0.5, -0.5));
  EXPECT_THROW(chebyshev_t(-1.0, 0.5), ParameterError);
}

TEST(Chebyshev, ThreeTermRecurrence) {
  for (double x = -3.0; x <= 3.0; x += 0.0625) {
    for (int n = 1; n < 12; ++n) {
      const double lhs = chebyshev_t(n + 1, x);
      const double rhs = 2.0 * x * chebyshev_t(n, x) - chebyshev_t(n - 1, x);
      EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(lhs))) << "n=" << n << " x=" << x;
    }
  }
}

TEST(Schedule, DeltaOneDegeneratesToNaivePhases) {
  const AngleSchedule s = build_schedule(3, 1.0);
  EXPECT_EQ(s.L, 7);
  EXPECT_EQ(s.eta, 1.0);
  for (double a : s.alphas) EXPECT_NEAR(a, -std::numbers::pi, 1e-15);
  for (double b : s.betas) EXPECT_NEAR(b, -std::numbers::pi, 1e-15);
}

TEST(Schedule, PinnedSingleQueryAngle) {
  // Independent 40-digit evaluation: eta = 1/cosh(arccosh(2)/3) = 0.91082008220205693...,
  // alpha_1 = -2 arccot(tan(2 pi / 3) sqrt(1 - eta^2)) = -4.38303293328246301...
  const AngleSchedule s = build_schedule(1, 0.25);
  EXPECT_NEAR(s.eta, 0.910820082202056934, 1e-15);
  ASSERT_EQ(s.alphas.size(), 1u);
  EXPECT_NEAR(s.alphas[0], -4.383032933282463015, 1e-13);
  EXPECT_EQ(s.betas[0], s.alphas[0]);
}

TEST(Schedule, BetaReversalAndRangeProperty) {
  for (int q = 1; q <= 60; ++q) {
    for (double delta : {1e-4, 0.01, 0.1, 0.25, 0.5, 0.9, 1.0}) {
      const AngleSchedule s = build_schedule(q, delta);
      ASSERT_EQ(s.L, 2 * q + 1);
      ASSERT_EQ(static_cast<int>(s.alphas.size()), q);
      ASSERT_GT(s.eta, 0.0);
      ASSERT_LE(s.eta, 1.0);
      if (delta < 1.0) EXPECT_LT(s.eta, 1.0);
      for (int j = 0; j < q; ++j) {
        // Bit-identical: betas is a reversed copy.
        ASSERT_EQ(s.betas[j], s.alphas[q - 1 - j]);
        ASSERT_GT(s.alphas[j], -2.0 * std::numbers::pi);
        ASSERT_LE(s.alphas[j], 0.0);
      }
    }
  }
}

TEST(Schedule, RejectsBadParameters) {
  EXPECT_THROW(build_schedule(0, 0.1), ParameterError);
  EXPECT_THROW(build_schedule(2, 0.0), ParameterError);
  EXPECT_THROW(build_schedule(2, 1.5), ParameterError);
}

TEST(RequiredQueries, Examples) {
  EXPECT_EQ(required_queries(1.0 / 237.0, 0.1), 14);
  EXPECT_EQ(required_queries(1.0, 0.1), 1);
  // Rastrigin row: 1/lambda = 1.3872e5 gives 343 from the bound; the published
  // simulated count is 353, about 3% higher.
  const int rastrigin = required_queries(1.0 / 1.3872e5, 0.1);
  EXPECT_EQ(rastrigin, 343);
  EXPECT_NEAR(rastrigin, 353, 0.05 * 353);
  EXPECT_THROW(required_queries(0.0, 0.1), ParameterError);
  EXPECT_THROW(required_queries(0.5, 1.0), ParameterError);
}

TEST(RequiredQueries, MonotoneInLambdaAndDelta) {
  const std::vector<double> lambdas{1e-5, 3e-5, 1e-4, 3e-4, 1e-3, 3e-3, 0.01, 0.03, 0.1, 0.3, 0.5};
  const std::vector<double> deltas{0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
  for (double d : deltas)
    for (std::size_t i = 1; i < lambdas.size(); ++i)
      EXPECT_LE(required_queries(lambdas[i], d), required_queries(lambdas[i - 1], d));
  for (double l : lambdas)
    for (std::size_t i = 1; i < deltas.size(); ++i)
      EXPECT_LE(required_queries(l, deltas[i]), required_queries(l, deltas[i - 1]));
}

TEST(LowerBound, Examples) {
  EXPECT_NEAR(lower_bound_queries(1.0, 0.25), 1.0 / std::numbers::sqrt2, 1e-14);
  EXPECT_NEAR(lower_bound_queries(0.5, 0.01), 2.0 * std::numbers::sqrt2, 1e-13);
  const double alpine = lower_bound_queries(0.9, 1.0 / 237.0);
  EXPECT_NEAR(alpine, 8.178161378694462, 1e-12);
  EXPECT_LE(alpine, *minimal_queries(1.0 / 237.0, 0.1));
  EXPECT_EQ(lower_bound_queries(0.01, 0.9), 0.0);
}

TEST(LowerBound, NeverExceedsSufficientCount) {
  for (double p : {0.9, 0.95, 0.99, 0.999}) {
    for (double lambda = 1e-6; lambda < 1.0; lambda *= 1.7) {
      EXPECT_LE(lower_bound_queries(p, lambda), required_queries(lambda, 1.0 - p)) << p << " " << lambda;
    }
  }
}

TEST(Pi3Queries, Examples) {
  EXPECT_NEAR(pi3_queries(0.5, 0.125), 1.0, 1e-12);
  EXPECT_NEAR(pi3_queries(0.01, std::exp(-1.0), true), 49.5, 1e-12);
  EXPECT_EQ(pi3_queries(1.0, 0.1), 0.0);
}

TEST(Pi3Queries, MatchesBruteForceRecursionDepth) {
  // The recursion only realises query counts (3^m - 1)/2; the smallest
  // successful depth is the first with 3^m >= 2 q_exact + 1.
  for (double lambda : {0.1, 0.03, 0.2, 0.5}) {
    for (double delta : {0.01, 0.1, 0.3}) {
      const int m = oracle::pi3_min_depth(lambda, delta);
      const double q_exact = pi3_queries(lambda, delta);
      const int m_from_formula = std::max(0, static_cast<int>(std::ceil(std::log(2.0 * q_exact + 1.0) / std::log(3.0) - 1e-12)));
      EXPECT_EQ(m, m_from_formula) << lambda << " " << delta;
    }
  }
  EXPECT_EQ(oracle::pi3_min_depth(0.1, 0.01), 4);  // 40 queries vs exact form 21.35
}

}  // namespace
}  // namespace fpcs
