#pragma once
// Overlap lambda = m(Q) / m(A) under the equal superposition on A, by Monte
// Carlo sampling or by grid quadrature with boundary refinement.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpcs/error.hpp"
#include "fpcs/parallel.hpp"
#include "fpcs/problems.hpp"

namespace fpcs {

enum class OverlapMethod { monte_carlo, grid };

inline std::string to_string(OverlapMethod m) { return m == OverlapMethod::monte_carlo ? "monte_carlo" : "grid"; }

inline OverlapMethod overlap_method_from_string(std::string_view s) {
  if (s == "monte_carlo" || s == "mc") return OverlapMethod::monte_carlo;
  if (s == "grid") return OverlapMethod::grid;
  throw ParameterError("unknown overlap method '" + std::string(s) + "' (expected monte_carlo or grid)");
}

struct OverlapEstimate {
  double lambda = 0.0;
  double std_error = 0.0;
  std::int64_t samples_or_cells = 0;
  OverlapMethod method = OverlapMethod::grid;
  std::optional<std::uint64_t> seed;

  bool empty() const { return lambda == 0.0; }
};

/// Independent MC substreams; fixed so estimates do not depend on thread count.
inline constexpr int kMonteCarloShards = 64;
inline constexpr double kMinAcceptance = 1e-3;

namespace detail {

inline std::mt19937_64 shard_engine(std::uint64_t seed, int shard) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(shard)};
  return std::mt19937_64(seq);
}

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Rejection-samples `samples` uniform points of A from the bounding box and
/// returns the hit fraction with its binomial standard error.
inline OverlapEstimate estimate_lambda_mc(const SearchProblem& problem, std::int64_t samples, std::uint64_t seed, int threads = 0) {
  detail::require(samples >= 1, "estimate_lambda_mc: samples must be at least 1");
  detail::require(problem.dimension >= 1 && problem.dimension <= kMaxFeatureDim, "estimate_lambda_mc: unsupported dimension");

  struct ShardResult {
    std::int64_t hits = 0;
    std::int64_t accepted = 0;
    std::int64_t attempts = 0;
  };
  std::vector<ShardResult> results(kMonteCarloShards);
  const int d = problem.dimension;

  parallel_for(kMonteCarloShards, threads, [&](std::size_t s) {
    const std::int64_t quota = samples / kMonteCarloShards + (static_cast<std::int64_t>(s) < samples % kMonteCarloShards ? 1 : 0);
    // Beyond this many draws the acceptance rate is certainly below the floor.
    const std::int64_t max_attempts = static_cast<std::int64_t>(quota / kMinAcceptance) + 10000;
    std::mt19937_64 rng = detail::shard_engine(seed, static_cast<int>(s));
    std::array<double, kMaxFeatureDim> x{};
    std::span<const double> view(x.data(), d);
    ShardResult r;
    while (r.accepted < quota) {
      if (r.attempts >= max_attempts) break;
      for (int k = 0; k < d; ++k) {
        const Interval& iv = problem.bounding_box[k];
        x[k] = iv.lo + iv.width() * detail::uniform01(rng);
      }
      ++r.attempts;
      if (!problem.in_region(view)) continue;
      ++r.accepted;
      if (problem.meets_criterion(view)) ++r.hits;
    }
    results[s] = r;
  });

  ShardResult total;
  for (const ShardResult& r : results) {
    total.hits += r.hits;
    total.accepted += r.accepted;
    total.attempts += r.attempts;
  }
  if (total.accepted < samples || static_cast<double>(total.accepted) < kMinAcceptance * static_cast<double>(total.attempts)) {
    throw DomainError("estimate_lambda_mc: bounding-box acceptance below 1e-3 for problem '" + problem.name +
                      "'; use the grid method instead");
  }

  OverlapEstimate est;
  est.method = OverlapMethod::monte_carlo;
  est.samples_or_cells = samples;
  est.seed = seed;
  est.lambda = static_cast<double>(total.hits) / static_cast<double>(samples);
  est.std_error = std::sqrt(est.lambda * (1.0 - est.lambda) / static_cast<double>(samples));
  return est;
}

namespace detail {

// Per-point class: bit 0 = inside A, bit 1 = indicator f.
inline std::uint8_t classify(const SearchProblem& p, std::span<const double> x) {
  if (!p.in_region(x)) return 0;
  return p.meets_criterion(x) ? 3 : 1;
}

class GridIntegrator {
 public:
  GridIntegrator(const SearchProblem& p, int base, int refine) : p_(p), d_(p.dimension), n_(base), refine_(refine) {
    for (int k = 0; k < d_; ++k) h_[k] = p.bounding_box[k].width() / base;
  }

  // Sums (m(A), m(Q)) in units of one base cell over cells with first index in [i0, i1).
  std::pair<double, double> integrate_slab(int i0, int i1) const {
    const int m = n_ + 1;
    const std::size_t plane = d_ == 1 ? 1 : d_ == 2 ? static_cast<std::size_t>(m) : static_cast<std::size_t>(m) * m;
    std::vector<std::uint8_t> lower(plane), upper(plane);
    fill_plane(i0, lower);
    std::int64_t whole_a = 0, whole_q = 0;
    double sum_a = 0.0, sum_q = 0.0;
    const int cells_j = d_ >= 2 ? n_ : 1;
    const int cells_k = d_ >= 3 ? n_ : 1;
    const int nc = 1 << d_;
    for (int i = i0; i < i1; ++i) {
      fill_plane(i + 1, upper);
      if (d_ == 2) {
        for (int j = 0; j < n_; ++j) {
          const std::uint8_t c0 = lower[j];
          if (lower[j + 1] == c0 && upper[j] == c0 && upper[j + 1] == c0) {
            whole_a += c0 & 1;
            whole_q += c0 >> 1;
            continue;
          }
          const std::array<std::uint8_t, 8> corners{c0, upper[j], lower[j + 1], upper[j + 1]};
          const auto [a, q] = cell_measure({coordinate(0, i), coordinate(1, j), 0.0}, h_, corners, refine_);
          sum_a += a;
          sum_q += q;
        }
        std::swap(lower, upper);
        continue;
      }
      for (int j = 0; j < cells_j; ++j) {
        for (int k = 0; k < cells_k; ++k) {
          std::array<std::uint8_t, 8> corners{};
          bool uniform = true;
          for (int c = 0; c < nc; ++c) {
            const int dj = (c >> 1) & 1, dk = (c >> 2) & 1;
            const std::size_t idx = d_ == 1 ? 0 : d_ == 2 ? static_cast<std::size_t>(j + dj)
                                                          : static_cast<std::size_t>(j + dj) * m + static_cast<std::size_t>(k + dk);
            corners[c] = (c & 1) ? upper[idx] : lower[idx];
            uniform = uniform && corners[c] == corners[0];
          }
          if (uniform) {
            whole_a += corners[0] & 1;
            whole_q += corners[0] >> 1;
            continue;
          }
          std::array<double, 3> lo{};
          lo[0] = coordinate(0, i);
          if (d_ >= 2) lo[1] = coordinate(1, j);
          if (d_ >= 3) lo[2] = coordinate(2, k);
          const auto [a, q] = cell_measure(lo, h_, corners, refine_);
          sum_a += a;
          sum_q += q;
        }
      }
      std::swap(lower, upper);
    }
    return {static_cast<double>(whole_a) + sum_a, static_cast<double>(whole_q) + sum_q};
  }

 private:
  double coordinate(int axis, int index) const {
    const Interval& iv = p_.bounding_box[axis];
    return index == n_ ? iv.hi : iv.lo + index * h_[axis];
  }

  void fill_plane(int i, std::vector<std::uint8_t>& out) const {
    std::array<double, 3> x{};
    x[0] = coordinate(0, i);
    std::span<const double> view(x.data(), d_);
    if (d_ == 1) {
      out[0] = classify(p_, view);
      return;
    }
    const int m = n_ + 1;
    for (int j = 0; j < m; ++j) {
      x[1] = coordinate(1, j);
      if (d_ == 2) {
        out[j] = classify(p_, view);
        continue;
      }
      for (int k = 0; k < m; ++k) {
        x[2] = coordinate(2, k);
        out[static_cast<std::size_t>(j) * m + k] = classify(p_, view);
      }
    }
  }

  std::pair<double, double> cell_measure(const std::array<double, 3>& lo, const std::array<double, 3>& h,
                                         const std::array<std::uint8_t, 8>& corners, int level) const {
    const int nc = 1 << d_;
    bool uniform = true;
    for (int c = 1; c < nc; ++c) uniform = uniform && corners[c] == corners[0];
    if (uniform) return {static_cast<double>(corners[0] & 1), static_cast<double>(corners[0] >> 1)};
    if (level == 0) {
      // Inner rule: a leaf counts only when every corner is in the set.
      std::uint8_t all = 3;
      for (int c = 0; c < nc; ++c) all &= corners[c];
      return {static_cast<double>(all & 1), static_cast<double>(all >> 1)};
    }

    // 3^d half-step lattice; the cell corners are reused.
    std::array<std::uint8_t, 27> lattice{};
    std::array<double, 3> half{h[0] / 2, h[1] / 2, h[2] / 2};
    const int side = 3;
    const int points = d_ == 1 ? 3 : d_ == 2 ? 9 : 27;
    std::array<double, 3> x{};
    std::span<const double> view(x.data(), d_);
    for (int t = 0; t < points; ++t) {
      const int t0 = t % side, t1 = (t / side) % side, t2 = t / (side * side);
      if (t0 != 1 && t1 != 1 && t2 != 1) {
        const int c = (t0 / 2) | ((t1 / 2) << 1) | ((t2 / 2) << 2);
        lattice[t] = corners[c];
        continue;
      }
      x[0] = lo[0] + t0 * half[0];
      x[1] = lo[1] + t1 * half[1];
      x[2] = lo[2] + t2 * half[2];
      lattice[t] = classify(p_, view);
    }

    double a = 0.0, q = 0.0;
    for (int s = 0; s < nc; ++s) {
      const int s0 = s & 1, s1 = (s >> 1) & 1, s2 = (s >> 2) & 1;
      std::array<double, 3> sub_lo{lo[0] + s0 * half[0], lo[1] + s1 * half[1], lo[2] + s2 * half[2]};
      std::array<std::uint8_t, 8> sub{};
      for (int c = 0; c < nc; ++c) {
        const int u0 = s0 + (c & 1), u1 = s1 + ((c >> 1) & 1), u2 = s2 + ((c >> 2) & 1);
        sub[c] = lattice[u0 + side * u1 + side * side * u2];
      }
      const auto [sa, sq] = cell_measure(sub_lo, half, sub, level - 1);
      a += sa;
      q += sq;
    }
    return {a / nc, q / nc};
  }

  const SearchProblem& p_;
  int d_;
  int n_;
  int refine_;
  std::array<double, 3> h_{};
};

}  // namespace detail

/// Tensor-grid quadrature over the bounding box. Cells whose corners disagree
/// on A- or f-membership are split in half along every axis, `refine_levels`
/// times; a leaf counts only when all its corners agree on membership, so for
/// convex sets the estimate increases monotonically toward the true measure.
inline OverlapEstimate estimate_lambda_grid(const SearchProblem& problem, int base_resolution, int refine_levels, int threads = 0) {
  if (problem.dimension > 3)
    throw ParameterError("estimate_lambda_grid: dimension " + std::to_string(problem.dimension) +
                         " is unsupported by the grid method; use monte_carlo");
  detail::require(problem.dimension >= 1, "estimate_lambda_grid: dimension must be positive");
  detail::require(base_resolution >= 16, "estimate_lambda_grid: base_resolution must be at least 16");
  detail::require(refine_levels >= 0 && refine_levels <= 20, "estimate_lambda_grid: refine_levels must lie in [0, 20]");

  const detail::GridIntegrator integrator(problem, base_resolution, refine_levels);
  const int slabs = std::min(base_resolution, 256);
  std::vector<std::pair<double, double>> partial(slabs);
  parallel_for(slabs, threads, [&](std::size_t s) {
    const int i0 = static_cast<int>(static_cast<std::int64_t>(base_resolution) * s / slabs);
    const int i1 = static_cast<int>(static_cast<std::int64_t>(base_resolution) * (s + 1) / slabs);
    partial[s] = integrator.integrate_slab(i0, i1);
  });
  double area = 0.0, target = 0.0;
  for (const auto& [a, q] : partial) {
    area += a;
    target += q;
  }
  if (area <= 0.0) throw DomainError("estimate_lambda_grid: region A of problem '" + problem.name + "' has zero measure on the grid");

  OverlapEstimate est;
  est.method = OverlapMethod::grid;
  est.samples_or_cells = static_cast<std::int64_t>(std::pow(static_cast<double>(base_resolution), problem.dimension));
  est.lambda = target / area;
  return est;
}

struct ClassicalBaseline {
  double iterations = std::numeric_limits<double>::infinity();
  bool reachable = false;  // false when lambda = 0: no number of draws finds a target
};

/// Expected number of independent uniform draws until a hit, 1 / lambda.
inline ClassicalBaseline classical_expected_iterations(double lambda) {
  detail::require(lambda >= 0.0 && lambda <= 1.0, "classical_expected_iterations: lambda must lie in [0, 1]");
  if (lambda == 0.0) return {};
  return {1.0 / lambda, true};
}

}  // namespace fpcs
