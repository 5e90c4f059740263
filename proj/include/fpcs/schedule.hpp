#pragma once
// Chebyshev phase schedule of the fixed-point search and the closed-form
// query-count formulas that go with it.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "fpcs/error.hpp"

namespace fpcs {

/// Chebyshev polynomial of the first kind, T_L(x) = cos(L arccos x), for a
/// real (possibly fractional) order L >= 0. For |x| > 1 the hyperbolic
/// continuation is used; x < -1 is only defined for integer L.
inline double chebyshev_t(double order, double x) {
  detail::require(order >= 0.0 && std::isfinite(order), "chebyshev_t: order must be a finite non-negative real");
  detail::require(!std::isnan(x), "chebyshev_t: x is NaN");
  if (std::abs(x) <= 1.0) return std::cos(order * std::acos(x));
  if (x > 1.0) return std::cosh(order * std::acosh(x));
  const double rounded = std::round(order);
  if (rounded != order) throw DomainError("chebyshev_t: x < -1 requires an integer order");
  const double magnitude = std::cosh(order * std::acosh(-x));
  return std::fmod(rounded, 2.0) == 0.0 ? magnitude : -magnitude;
}

/// Phase sequence (alpha_j, beta_j), j = 1..q, of the fixed-point search.
struct AngleSchedule {
  int q = 0;
  int L = 1;           // 2q + 1
  double delta = 1.0;  // target error: success means p >= 1 - delta
  double eta = 1.0;    // 1 / T_{1/L}(1/sqrt(delta))
  std::vector<double> alphas;
  std::vector<double> betas;
};

namespace detail {

// arccot with range (0, pi), continuous through y = 0.
inline double arccot(double y) { return std::atan2(1.0, y); }

}  // namespace detail

inline AngleSchedule build_schedule(int q, double delta) {
  detail::require(q >= 1, "build_schedule: q must be >= 1");
  detail::require(delta > 0.0 && delta <= 1.0, "build_schedule: delta must lie in (0, 1]");

  AngleSchedule s;
  s.q = q;
  s.L = 2 * q + 1;
  s.delta = delta;
  s.eta = 1.0 / chebyshev_t(1.0 / s.L, 1.0 / std::sqrt(delta));
  const double root = std::sqrt(std::max(0.0, 1.0 - s.eta * s.eta));

  s.alphas.resize(q);
  for (int j = 1; j <= q; ++j) {
    // L is odd, so 2*pi*j/L never hits pi/2 and tan stays finite.
    assert(4 * j != s.L);
    const double t = std::tan(2.0 * std::numbers::pi * j / s.L);
    s.alphas[j - 1] = -2.0 * detail::arccot(t * root);
  }
  s.betas.assign(s.alphas.rbegin(), s.alphas.rend());
  return s;
}

/// Sufficient number of queries q >= (ln(2/sqrt(delta))/sqrt(lambda) - 1)/2,
/// rounded up and floored at zero.
inline int required_queries(double lambda, double delta) {
  detail::require(lambda > 0.0 && lambda <= 1.0, "required_queries: lambda must lie in (0, 1]");
  detail::require(delta > 0.0 && delta < 1.0, "required_queries: delta must lie in (0, 1)");
  const double bound = 0.5 * (std::log(2.0 / std::sqrt(delta)) / std::sqrt(lambda) - 1.0);
  return std::max(0, static_cast<int>(std::ceil(bound)));
}

/// n = ceil(1/lambda), guarded against 1/lambda landing a few ulps above an
/// integer (lambda = 1/237 must give 237, not 238).
inline std::int64_t inverse_overlap_count(double lambda) {
  const double inv = 1.0 / lambda;
  const double nearest = std::round(inv);
  if (std::abs(inv - nearest) <= 8.0 * std::numeric_limits<double>::epsilon() * inv) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::ceil(inv));
}

/// Lower bound on the queries any quantum search needs to reach success
/// probability p: (1/(2 sqrt 2)) [(1 + sqrt p - sqrt(1-p)) sqrt(n) - 2], n = ceil(1/lambda).
inline double lower_bound_queries(double p, double lambda) {
  detail::require(p > 0.0 && p <= 1.0, "lower_bound_queries: p must lie in (0, 1]");
  detail::require(lambda > 0.0 && lambda <= 1.0, "lower_bound_queries: lambda must lie in (0, 1]");
  const double n = static_cast<double>(inverse_overlap_count(lambda));
  const double value = ((1.0 + std::sqrt(p) - std::sqrt(1.0 - p)) * std::sqrt(n) - 2.0) / (2.0 * std::numbers::sqrt2);
  return std::max(0.0, value);
}

/// Queries needed by the recursive pi/3 search. The exact form is
/// (ln delta / ln(1 - lambda) - 1) / 2; `asymptotic` selects (-ln delta / lambda - 1) / 2.
inline double pi3_queries(double lambda, double delta, bool asymptotic = false) {
  detail::require(lambda > 0.0 && lambda <= 1.0, "pi3_queries: lambda must lie in (0, 1]");
  detail::require(delta > 0.0 && delta < 1.0, "pi3_queries: delta must lie in (0, 1)");
  if (asymptotic) return 0.5 * (-std::log(delta) / lambda - 1.0);
  if (lambda == 1.0) return 0.0;
  return 0.5 * (std::log(delta) / std::log1p(-lambda) - 1.0);
}

}  // namespace fpcs
