#pragma once
// Reference computations used only by the test suites. Nothing here calls
// into the library code paths it is used to check.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace fpcs::oracle {

using C = std::complex<double>;
using Mat2 = std::array<std::array<C, 2>, 2>;

inline Mat2 matmul(const Mat2& a, const Mat2& b) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

/// Success probability of the fixed-point product U^(q) by explicit 2x2
/// matrix products, with the phases recomputed from the closed form.
inline double fixed_point_by_matrix_product(double lambda, int q, double delta) {
  const int L = 2 * q + 1;
  const double gamma_inv = std::cosh(std::acosh(1.0 / std::sqrt(delta)) / L);
  const double root = std::sqrt(1.0 - 1.0 / (gamma_inv * gamma_inv));
  const double a = std::sqrt(1.0 - lambda);
  const double b = std::sqrt(lambda);

  Mat2 u{{{C(1), C(0)}, {C(0), C(1)}}};
  for (int j = 1; j <= q; ++j) {
    const double alpha = -2.0 * (std::numbers::pi / 2.0 - std::atan(std::tan(2.0 * std::numbers::pi * j / L) * root));
    const int jb = q - j + 1;
    const double beta = -2.0 * (std::numbers::pi / 2.0 - std::atan(std::tan(2.0 * std::numbers::pi * jb / L) * root));
    const C ea = std::exp(C(0, alpha));
    const C k = 1.0 - ea;
    Mat2 rphi{{{1.0 - k * a * a, -k * a * b}, {-k * a * b, 1.0 - k * b * b}}};
    Mat2 rt{{{C(1), C(0)}, {C(0), std::exp(C(0, beta))}}};
    u = matmul(matmul(rphi, rt), u);
  }
  const C amp = u[1][0] * a + u[1][1] * b;
  return std::norm(amp);
}

/// Closed form of the fixed-point success probability,
/// 1 - delta * T_L(T_{1/L}(1/sqrt(delta)) sqrt(1 - lambda))^2.
inline double fixed_point_closed_form(double lambda, int q, double delta) {
  const int L = 2 * q + 1;
  const double x = std::cosh(std::acosh(1.0 / std::sqrt(delta)) / L) * std::sqrt(1.0 - lambda);
  const double t = x <= 1.0 ? std::cos(L * std::acos(x)) : std::cosh(L * std::acosh(x));
  return 1.0 - delta * t * t;
}

/// Smallest q whose schedule succeeds, from the closed form:
/// L >= arccosh(1/sqrt(delta)) / artanh(sqrt(lambda)).
inline int minimal_queries_closed_form(double lambda, double delta) {
  if (lambda >= 1.0 - delta) return 0;
  const double l_min = std::acosh(1.0 / std::sqrt(delta)) / std::atanh(std::sqrt(lambda));
  int q = std::max(1, static_cast<int>(std::ceil((l_min - 1.0) / 2.0)) - 1);
  while (fixed_point_closed_form(lambda, q, delta) < 1.0 - delta) ++q;
  return q;
}

inline double naive_closed_form(double lambda, int k) {
  const double s = std::sin((2 * k + 1) * std::asin(std::sqrt(lambda)));
  return s * s;
}

/// Smallest recursion depth m with 1 - (1 - lambda)^(3^m) >= 1 - delta.
inline int pi3_min_depth(double lambda, double delta) {
  int m = 0;
  while (1.0 - std::pow(1.0 - lambda, std::pow(3.0, m)) < 1.0 - delta) ++m;
  return m;
}

/// Mean number of independent uniform draws until a hit, by simulation.
inline double geometric_trial_mean(double lambda, std::int64_t trials, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::geometric_distribution<std::int64_t> failures(lambda);
  double total = 0.0;
  for (std::int64_t i = 0; i < trials; ++i) total += static_cast<double>(failures(gen) + 1);
  return total / static_cast<double>(trials);
}

}  // namespace fpcs::oracle
