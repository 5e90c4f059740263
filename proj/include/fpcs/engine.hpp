#pragma once
// Exact evolution of the search state inside the two-dimensional subspace
// spanned by {|t_bar>, |t>}. Every Grover iteration G(alpha, beta) = R_phi(alpha) R_t(beta)
// costs exactly one oracle query.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fpcs/error.hpp"
#include "fpcs/schedule.hpp"

namespace fpcs {

using Complex = std::complex<double>;

/// Amplitudes along |t_bar> and |t>.
struct TwoLevelState {
  Complex a_tbar{1.0, 0.0};
  Complex a_t{0.0, 0.0};

  double success_probability() const { return std::norm(a_t); }
  double norm_squared() const { return std::norm(a_tbar) + std::norm(a_t); }
};

/// 2x2 density matrix in the {|t_bar>, |t>} basis.
struct DensityState {
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();

  double success_probability() const { return rho(1, 1).real(); }
};

enum class TraceMode { fixed_point, naive, pi3, noisy };

inline std::string_view to_string(TraceMode mode) {
  switch (mode) {
    case TraceMode::fixed_point: return "fixed_point";
    case TraceMode::naive: return "naive";
    case TraceMode::pi3: return "pi3";
    case TraceMode::noisy: return "noisy";
  }
  return "unknown";
}

inline TraceMode trace_mode_from_string(std::string_view name) {
  if (name == "fixed_point") return TraceMode::fixed_point;
  if (name == "naive") return TraceMode::naive;
  if (name == "pi3") return TraceMode::pi3;
  if (name == "noisy") return TraceMode::noisy;
  throw ParameterError("unknown trace mode '" + std::string(name) + "'");
}

struct TracePoint {
  std::int64_t q = 0;
  double p = 0.0;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

/// Success probability as a function of the number of oracle queries.
struct Trace {
  double lambda = 0.0;
  std::optional<double> delta;
  TraceMode mode = TraceMode::fixed_point;
  std::optional<double> depol;
  std::vector<TracePoint> points;

  double final_p() const { return points.empty() ? 0.0 : points.back().p; }
};

inline TwoLevelState initial_state(double lambda) {
  detail::require(lambda >= 0.0 && lambda <= 1.0, "initial_state: lambda must lie in [0, 1]");
  return {Complex{std::sqrt(1.0 - lambda), 0.0}, Complex{std::sqrt(lambda), 0.0}};
}

/// R_phi(alpha) R_t(beta) |state>, with R_t = diag(1, e^{i beta}) and
/// R_phi = I - (1 - e^{i alpha}) |phi><phi|, |phi> = initial_state(lambda).
inline TwoLevelState apply_iteration(const TwoLevelState& state, double alpha, double beta, double lambda) {
  const TwoLevelState phi = initial_state(lambda);
  TwoLevelState out = state;
  out.a_t *= std::polar(1.0, beta);
  // phi is real, so <phi|s> needs no conjugation of its components.
  const Complex overlap = phi.a_tbar.real() * out.a_tbar + phi.a_t.real() * out.a_t;
  const Complex factor = (1.0 - std::polar(1.0, alpha)) * overlap;
  out.a_tbar -= factor * phi.a_tbar.real();
  out.a_t -= factor * phi.a_t.real();
  return out;
}

/// The 2x2 matrix of G(alpha, beta) = R_phi(alpha) R_t(beta).
inline Eigen::Matrix2cd iteration_matrix(double alpha, double beta, double lambda) {
  detail::require(lambda >= 0.0 && lambda <= 1.0, "iteration_matrix: lambda must lie in [0, 1]");
  Eigen::Vector2cd phi(std::sqrt(1.0 - lambda), std::sqrt(lambda));
  Eigen::Matrix2cd r_phi = Eigen::Matrix2cd::Identity() - (1.0 - std::polar(1.0, alpha)) * (phi * phi.adjoint());
  Eigen::Matrix2cd r_t = Eigen::Matrix2cd::Identity();
  r_t(1, 1) = std::polar(1.0, beta);
  return r_phi * r_t;
}

namespace detail {

inline void require_overlap(double lambda, const char* who) {
  require(lambda >= 0.0 && lambda <= 1.0, std::string(who) + ": lambda must lie in [0, 1]");
}

}  // namespace detail

/// Builds the schedule for q and applies G(alpha_1, beta_1) first. Points
/// record p after every step; only the final one carries the 1 - delta guarantee.
inline Trace run_fixed_point(double lambda, int q, double delta) {
  detail::require_overlap(lambda, "run_fixed_point");
  const AngleSchedule schedule = build_schedule(q, delta);
  Trace trace{lambda, delta, TraceMode::fixed_point, std::nullopt, {}};
  trace.points.reserve(q);
  TwoLevelState state = initial_state(lambda);
  for (int j = 0; j < q; ++j) {
    state = apply_iteration(state, schedule.alphas[j], schedule.betas[j], lambda);
    trace.points.push_back({j + 1, state.success_probability()});
  }
  return trace;
}

/// Final success probability of the schedule built for exactly q queries.
inline double fixed_point_final_p(double lambda, int q, double delta) {
  if (q == 0) return lambda;
  return run_fixed_point(lambda, q, delta).final_p();
}

/// alpha = beta = pi for every step: ordinary Grover search.
inline Trace run_naive_grover(double lambda, int q_max) {
  detail::require(lambda > 0.0 && lambda < 1.0, "run_naive_grover: lambda must lie in (0, 1)");
  detail::require(q_max >= 0, "run_naive_grover: q_max must be >= 0");
  Trace trace{lambda, std::nullopt, TraceMode::naive, std::nullopt, {}};
  trace.points.reserve(q_max);
  TwoLevelState state = initial_state(lambda);
  for (int k = 1; k <= q_max; ++k) {
    state = apply_iteration(state, std::numbers::pi, std::numbers::pi, lambda);
    trace.points.push_back({k, state.success_probability()});
  }
  return trace;
}

struct Pi3Result {
  std::int64_t queries = 0;
  double p = 0.0;
};

/// Recursive pi/3 search U_m = U_{m-1} R_s U_{m-1}^dag R_t U_{m-1}, U_0 = U.
/// U is realised as the real rotation taking |s> = |t_bar> to |phi>, which
/// keeps every operator inside the same two-dimensional space.
inline Pi3Result run_pi3(double lambda, int m) {
  detail::require(lambda > 0.0 && lambda <= 1.0, "run_pi3: lambda must lie in (0, 1]");
  detail::require(m >= 0 && m <= 20, "run_pi3: m must lie in [0, 20]");

  const double c = std::sqrt(1.0 - lambda);
  const double s = std::sqrt(lambda);
  Eigen::Matrix2cd u;
  u << c, -s, s, c;

  const Complex phase = 1.0 - std::polar(1.0, std::numbers::pi / 3.0);
  Eigen::Matrix2cd r_s = Eigen::Matrix2cd::Identity();
  r_s(0, 0) -= phase;
  Eigen::Matrix2cd r_t = Eigen::Matrix2cd::Identity();
  r_t(1, 1) -= phase;

  std::int64_t queries = 0;
  for (int level = 0; level < m; ++level) {
    u = (u * r_s * u.adjoint() * r_t * u).eval();
    queries = 3 * queries + 1;
  }
  return {queries, std::norm(u(1, 0))};
}

/// (queries, p) for every recursion depth 0..m.
inline Trace run_pi3_trace(double lambda, int m) {
  Trace trace{lambda, std::nullopt, TraceMode::pi3, std::nullopt, {}};
  for (int level = 0; level <= m; ++level) {
    const Pi3Result r = run_pi3(lambda, level);
    trace.points.push_back({r.queries, r.p});
  }
  return trace;
}

/// Density-matrix evolution with the depolarising channel
/// rho -> (1 - depol) G rho G^dag + (depol / 2) I applied after every iteration.
inline Trace run_noisy(double lambda, int q, double delta, double depol) {
  detail::require_overlap(lambda, "run_noisy");
  detail::require(depol >= 0.0 && depol <= 1.0, "run_noisy: depol must lie in [0, 1]");
  const AngleSchedule schedule = build_schedule(q, delta);

  Trace trace{lambda, delta, TraceMode::noisy, depol, {}};
  trace.points.reserve(q);
  Eigen::Vector2cd phi(std::sqrt(1.0 - lambda), std::sqrt(lambda));
  DensityState state{phi * phi.adjoint()};
  for (int j = 0; j < q; ++j) {
    const Eigen::Matrix2cd g = iteration_matrix(schedule.alphas[j], schedule.betas[j], lambda);
    state.rho = (1.0 - depol) * (g * state.rho * g.adjoint()) + (0.5 * depol) * Eigen::Matrix2cd::Identity();
    trace.points.push_back({j + 1, state.success_probability()});
  }
  return trace;
}

/// Final success probability under noise, for the schedule built for q.
inline double noisy_final_p(double lambda, int q, double delta, double depol) {
  if (q == 0) return lambda;
  return run_noisy(lambda, q, delta, depol).final_p();
}

/// Smallest q <= q_cap whose own schedule ends with p >= 1 - delta.
/// Starts from required_queries and scans linearly; nullopt when the cap is hit.
inline std::optional<int> minimal_queries(double lambda, double delta, int q_cap = 1'000'000) {
  detail::require(lambda > 0.0 && lambda <= 1.0, "minimal_queries: lambda must lie in (0, 1]");
  detail::require(delta > 0.0 && delta < 1.0, "minimal_queries: delta must lie in (0, 1)");
  detail::require(q_cap >= 0, "minimal_queries: q_cap must be >= 0");

  const double threshold = 1.0 - delta;
  if (lambda >= threshold) return 0;
  if (q_cap == 0) return std::nullopt;

  auto succeeds = [&](int q) { return fixed_point_final_p(lambda, q, delta) >= threshold; };

  int q = std::clamp(required_queries(lambda, delta), 1, q_cap);
  if (succeeds(q)) {
    while (q > 1 && succeeds(q - 1)) --q;
    return q;
  }
  for (++q; q <= q_cap; ++q) {
    if (succeeds(q)) return q;
  }
  return std::nullopt;
}

}  // namespace fpcs
