#pragma once
// Spectral window search at desk scale: B = poly(x, p) on a uniform mode
// grid, eigenvalue-window overlap, post-search eigenstate distribution, a
// pointer-mode simulation of the oracle O = U_H^dag U_C U_H, and a numerical
// check of the cubic-phase conjugation identity
//   exp(-i B (x) p) = exp(-i t2 x^3) exp(-i t1 p (x) p) exp(i t2 x^3),
// B = t1 (p + 3 t2 x^2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "fpcs/engine.hpp"
#include "fpcs/error.hpp"

namespace fpcs {

inline constexpr int kMaxOperatorDegree = 4;
inline constexpr int kMaxOperatorGrid = 1024;
inline constexpr int kMaxRetainedEigenpairs = 64;
inline constexpr double kWindowTieTolerance = 1e-9;

struct ModeGrid {
  int n_points = 256;
  double x_max = 8.0;

  double spacing() const { return 2.0 * x_max / n_points; }
  double position(int j) const { return -x_max + j * spacing(); }

  void validate() const {
    detail::require(n_points >= 2 && (n_points & (n_points - 1)) == 0, "mode grid: n_points must be a power of two");
    detail::require(x_max > 0.0, "mode grid: x_max must be positive");
  }

  Eigen::VectorXd positions() const {
    Eigen::VectorXd x(n_points);
    for (int j = 0; j < n_points; ++j) x(j) = position(j);
    return x;
  }

  /// 2 pi fftfreq(n, dx): non-negative frequencies first, Nyquist negative.
  Eigen::VectorXd momenta() const {
    Eigen::VectorXd p(n_points);
    const double dp = std::numbers::pi / x_max;
    for (int m = 0; m < n_points; ++m) p(m) = dp * (m < n_points / 2 ? m : m - n_points);
    return p;
  }
};

/// coefficient * x^x_power p^p_power, symmetrically ordered.
struct OperatorTerm {
  double coefficient = 1.0;
  int x_power = 0;
  int p_power = 0;
};

using OperatorSpec = std::vector<OperatorTerm>;

namespace detail {

using CVector = std::vector<std::complex<double>>;

inline void fft_forward(Eigen::FFT<double>& fft, const Complex* in, Complex* out, int n) { fft.fwd(out, in, n); }
inline void fft_inverse(Eigen::FFT<double>& fft, const Complex* in, Complex* out, int n) { fft.inv(out, in, n); }

/// Circulant matrix F^dag diag(p^b) F.
inline Eigen::MatrixXcd momentum_power(const ModeGrid& grid, int b) {
  const int n = grid.n_points;
  const Eigen::VectorXd p = grid.momenta();
  CVector spectrum(n), column(n);
  for (int m = 0; m < n; ++m) spectrum[m] = std::pow(p(m), b);
  Eigen::FFT<double> fft;
  fft_inverse(fft, spectrum.data(), column.data(), n);
  Eigen::MatrixXcd out(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) out(j, l) = column[static_cast<std::size_t>((j - l + n) % n)];
  return out;
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

/// Hermitian grid matrix of B. Mixed monomials use the Weyl (fully
/// symmetric) ordering 2^-a sum_k C(a,k) x^k p^b x^(a-k); the result is
/// symmetrized as (M + M^dag) / 2.
inline Eigen::MatrixXcd discretize_operator(const OperatorSpec& spec, const ModeGrid& grid) {
  grid.validate();
  detail::require(grid.n_points <= kMaxOperatorGrid, "discretize_operator: n_points must not exceed 1024");
  detail::require(!spec.empty(), "discretize_operator: operator has no terms");
  for (const OperatorTerm& t : spec) {
    detail::require(t.x_power >= 0 && t.x_power <= kMaxOperatorDegree && t.p_power >= 0 && t.p_power <= kMaxOperatorDegree,
                    "discretize_operator: powers must lie in [0, 4]");
  }
  const int n = grid.n_points;
  const Eigen::VectorXd x = grid.positions();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const OperatorTerm& t : spec) {
    if (t.coefficient == 0.0) continue;
    if (t.p_power == 0) {
      for (int j = 0; j < n; ++j) m(j, j) += t.coefficient * std::pow(x(j), t.x_power);
      continue;
    }
    const Eigen::MatrixXcd pb = detail::momentum_power(grid, t.p_power);
    const int a = t.x_power;
    for (int k = 0; k <= a; ++k) {
      const double w = t.coefficient * detail::binomial(a, k) / std::pow(2.0, a);
      const Eigen::VectorXd left = x.array().pow(k), right = x.array().pow(a - k);
      m += w * (left.asDiagonal() * pb * right.asDiagonal());
    }
  }
  return (m + m.adjoint()) / 2.0;
}

struct Eigensystem {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXcd vectors; // columns, grid l2-normalized
};

namespace detail {

// j -> (n - j) mod n realizes x -> -x on the grid (j = 0 has no partner and maps to itself).
inline int parity_partner(int j, int n) { return (n - j) % n; }

inline double parity_commutator_norm(const Eigen::MatrixXcd& b) {
  const int n = static_cast<int>(b.rows());
  double worst = 0.0;
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) worst = std::max(worst, std::abs(b(j, l) - b(parity_partner(j, n), parity_partner(l, n))));
  return worst;
}

// Rotates each degenerate eigenspace onto parity eigenvectors.
inline void resolve_parity(Eigensystem& es, double tol) {
  const int n = static_cast<int>(es.vectors.rows());
  const int count = static_cast<int>(es.values.size());
  int start = 0;
  while (start < count) {
    int end = start + 1;
    while (end < count && es.values(end) - es.values(end - 1) <= tol) ++end;
    const int k = end - start;
    if (k > 1) {
      Eigen::MatrixXcd block = es.vectors.middleCols(start, k);
      Eigen::MatrixXcd reflected(n, k);
      for (int j = 0; j < n; ++j) reflected.row(j) = block.row(parity_partner(j, n));
      Eigen::MatrixXcd pi_block = block.adjoint() * reflected;
      pi_block = (pi_block + pi_block.adjoint()) / 2.0;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(pi_block);
      es.vectors.middleCols(start, k) = block * eig.eigenvectors();
    }
    start = end;
  }
}

}  // namespace detail

/// Full eigendecomposition of a Hermitian grid matrix. When B commutes with
/// the grid reflection, degenerate eigenvectors are chosen with definite parity.
inline Eigensystem diagonalize(const Eigen::MatrixXcd& b) {
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  detail::require((b - b.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * scale, "diagonalize: matrix is not Hermitian");
  Eigensystem es;
  if (b.imag().cwiseAbs().maxCoeff() <= 1e-14 * scale) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b.real());
    es.values = eig.eigenvalues();
    es.vectors = eig.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(b);
    es.values = eig.eigenvalues();
    es.vectors = eig.eigenvectors();
  }
  if (detail::parity_commutator_norm(b) <= 1e-10 * scale) detail::resolve_parity(es, 1e-8 * scale);
  return es;
}

/// Parity expectation <v| Pi |v> of a grid vector; +-1 for definite parity.
inline double parity_expectation(const Eigen::VectorXcd& v) {
  const int n = static_cast<int>(v.size());
  Complex s = 0.0;
  for (int j = 0; j < n; ++j) s += std::conj(v(j)) * v(detail::parity_partner(j, n));
  return s.real();
}

/// Eigenpairs whose eigenvectors carry < 1e-6 probability in the outer 10% of
/// the grid (at most 64, lowest first). Discards artifacts of the truncation.
inline Eigensystem retained_eigensystem(const Eigensystem& full, double edge_mass_limit = 1e-6,
                                        int max_keep = kMaxRetainedEigenpairs) {
  const int n = static_cast<int>(full.vectors.rows());
  const int edge = std::max(1, n / 20);  // 5% per side
  std::vector<int> keep;
  for (int c = 0; c < full.values.size() && static_cast<int>(keep.size()) < max_keep; ++c) {
    double mass = 0.0;
    for (int j = 0; j < edge; ++j) mass += std::norm(full.vectors(j, c)) + std::norm(full.vectors(n - 1 - j, c));
    if (mass < edge_mass_limit) keep.push_back(c);
  }
  Eigensystem out;
  out.values.resize(static_cast<Eigen::Index>(keep.size()));
  out.vectors.resize(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.values(static_cast<Eigen::Index>(i)) = full.values(keep[i]);
    out.vectors.col(static_cast<Eigen::Index>(i)) = full.vectors.col(keep[i]);
  }
  return out;
}

struct SpectralWindow {
  double a = 0.0;
  double b = 0.0;

  bool contains(double e) const { return e >= a - kWindowTieTolerance && e <= b + kWindowTieTolerance; }
};

struct SpectralProblem {
  OperatorSpec operator_spec;
  ModeGrid grid;
  SpectralWindow window;
  Eigensystem eigen;               // retained eigenpairs
  Eigen::VectorXcd input_amplitudes;  // over the retained eigenbasis

  static SpectralProblem build(const OperatorSpec& spec, const ModeGrid& grid, SpectralWindow window) {
    detail::require(window.a <= window.b, "spectral problem: window needs a <= b");
    SpectralProblem p;
    p.operator_spec = spec;
    p.grid = grid;
    p.window = window;
    p.eigen = retained_eigensystem(diagonalize(discretize_operator(spec, grid)));
    detail::require(p.eigen.values.size() > 0, "spectral problem: no eigenpair passed the edge-mass filter");
    return p;
  }

  int size() const { return static_cast<int>(eigen.values.size()); }

  /// Equal superposition of the lowest `count` retained eigenstates.
  void set_equal_superposition(int count) {
    detail::require(count >= 1 && count <= size(), "spectral problem: superposition size out of range");
    input_amplitudes = Eigen::VectorXcd::Zero(size());
    for (int k = 0; k < count; ++k) input_amplitudes(k) = 1.0 / std::sqrt(static_cast<double>(count));
  }

  void set_amplitudes(const Eigen::VectorXcd& amplitudes) {
    detail::require(amplitudes.size() == size(), "spectral problem: amplitude vector has the wrong length");
    detail::require(std::abs(amplitudes.squaredNorm() - 1.0) <= 1e-12, "spectral problem: amplitudes must be normalized");
    input_amplitudes = amplitudes;
  }

  /// Projects a grid wavefunction onto the retained eigenbasis and
  /// renormalizes; returns the captured probability before renormalizing.
  double project_wavefunction(const Eigen::VectorXcd& psi) {
    detail::require(psi.size() == grid.n_points, "spectral problem: wavefunction length must equal n_points");
    const double total = psi.squaredNorm();
    detail::require(total > 0.0, "spectral problem: wavefunction is zero");
    Eigen::VectorXcd c = eigen.vectors.adjoint() * psi / std::sqrt(total);
    const double captured = c.squaredNorm();
    detail::require(captured > 1e-12, "spectral problem: wavefunction has no weight on the retained eigenstates");
    input_amplitudes = c / std::sqrt(captured);
    return captured;
  }
};

struct SpectralLambda {
  double lambda = 0.0;
  bool empty_window = true;  // no input weight in [a, b]: search impossible
  int states_in_window = 0;
};

inline SpectralLambda spectral_lambda(const Eigen::VectorXd& values, const Eigen::VectorXcd& amplitudes, SpectralWindow w) {
  detail::require(values.size() == amplitudes.size(), "spectral_lambda: size mismatch");
  SpectralLambda out;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (!w.contains(values(k))) continue;
    out.lambda += std::norm(amplitudes(k));
    ++out.states_in_window;
  }
  out.lambda = std::min(1.0, out.lambda);
  out.empty_window = out.lambda == 0.0;
  return out;
}

inline SpectralLambda spectral_lambda(const SpectralProblem& p) {
  detail::require(p.input_amplitudes.size() == p.size(), "spectral_lambda: input amplitudes not set");
  return spectral_lambda(p.eigen.values, p.input_amplitudes, p.window);
}

/// Eigenbasis amplitudes after search: in-window components scaled by
/// a_t / sqrt(lambda), the rest by a_tbar / sqrt(1 - lambda).
inline Eigen::VectorXcd post_search_distribution(const SpectralProblem& p, const TwoLevelState& final_state) {
  const double lambda = spectral_lambda(p).lambda;
  if (lambda <= 0.0 || lambda >= 1.0) return p.input_amplitudes;
  const Complex in_scale = final_state.a_t / std::sqrt(lambda);
  const Complex out_scale = final_state.a_tbar / std::sqrt(1.0 - lambda);
  Eigen::VectorXcd out(p.size());
  for (int k = 0; k < p.size(); ++k) out(k) = p.input_amplitudes(k) * (p.window.contains(p.eigen.values(k)) ? in_scale : out_scale);
  const double norm = out.norm();
  if (norm > 0.0) out /= norm;
  return out;
}

inline double in_window_mass(const SpectralProblem& p, const Eigen::VectorXcd& amplitudes) {
  double mass = 0.0;
  for (int k = 0; k < p.size(); ++k)
    if (p.window.contains(p.eigen.values(k))) mass += std::norm(amplitudes(k));
  return mass;
}

struct PipelineOptions {
  int flag_levels = 4;
  int initial_flag = 0;
  int pointer_points = 4096;
  std::optional<double> pointer_x_max;  // default 1.25 max(|E|, |a|, |b|, 1)
  double pointer_sigma_spacings = 4.0;
  double correctness_tolerance = 1e-6;
};

struct EigenstateCheck {
  double energy = 0.0;
  bool in_window = false;
  double correct_flag_probability = 0.0;
  bool flag_correct = false;
  double pointer_return_fidelity = 0.0;
  double norm = 0.0;
};

struct PipelineReport {
  ModeGrid pointer;
  int flag_levels = 4;
  std::vector<EigenstateCheck> states;
  std::vector<double> flag_distribution;  // reduced flag distribution for the input superposition
  double lambda = 0.0;
  double pointer_purity = 0.0;
  double max_norm_error = 0.0;

  bool all_flags_correct() const {
    return std::all_of(states.begin(), states.end(), [](const EigenstateCheck& s) { return s.flag_correct; });
  }
  double min_fidelity() const {
    double m = 1.0;
    for (const EigenstateCheck& s : states) m = std::min(m, s.pointer_return_fidelity);
    return m;
  }
};

/// Pointer-mode simulation of O = U_H^dag U_C U_H on every retained eigenstate.
/// U_H translates the pointer by E_alpha (Fourier phase ramp), U_C shifts the
/// modular flag by one where the pointer lies in [a, b], U_H^dag translates back.
inline PipelineReport simulate_oracle_pipeline(const SpectralProblem& p, const PipelineOptions& opt = {}) {
  detail::require(opt.flag_levels >= 2, "oracle pipeline: flag_levels must be at least 2");
  detail::require(opt.initial_flag >= 0 && opt.initial_flag < opt.flag_levels, "oracle pipeline: initial flag out of range");
  detail::require(p.size() <= kMaxRetainedEigenpairs, "oracle pipeline: at most 64 retained eigenpairs");
  detail::require(p.input_amplitudes.size() == p.size(), "oracle pipeline: input amplitudes not set");

  const double e_max = std::max(std::abs(p.eigen.values.minCoeff()), std::abs(p.eigen.values.maxCoeff()));
  ModeGrid ptr{opt.pointer_points,
               opt.pointer_x_max.value_or(1.25 * std::max({e_max, std::abs(p.window.a), std::abs(p.window.b), 1.0}))};
  ptr.validate();
  if (ptr.x_max < 1.2 * e_max) {
    throw ParameterError("oracle pipeline: retained spectrum (max |E| = " + std::to_string(e_max) +
                         ") exceeds the pointer window; need x_max >= 1.2 max |E|");
  }

  const int n = ptr.n_points;
  const Eigen::VectorXd x = ptr.positions();
  const Eigen::VectorXd k = ptr.momenta();
  const double sigma = opt.pointer_sigma_spacings * ptr.spacing();
  Eigen::VectorXcd psi0(n);
  for (int j = 0; j < n; ++j) psi0(j) = std::exp(-x(j) * x(j) / (4.0 * sigma * sigma));
  psi0.normalize();

  Eigen::FFT<double> fft;
  Eigen::VectorXcd spectrum(n), shifted(n);
  auto translate = [&](const Eigen::VectorXcd& in, double by) {
    detail::fft_forward(fft, in.data(), spectrum.data(), n);
    for (int m = 0; m < n; ++m) spectrum(m) *= std::exp(Complex(0.0, -k(m) * by));
    detail::fft_inverse(fft, spectrum.data(), shifted.data(), n);
    return Eigen::VectorXcd(shifted);
  };
  Eigen::ArrayXd mask(n);
  for (int j = 0; j < n; ++j) mask(j) = p.window.contains(x(j)) ? 1.0 : 0.0;

  PipelineReport report;
  report.pointer = ptr;
  report.flag_levels = opt.flag_levels;
  report.flag_distribution.assign(opt.flag_levels, 0.0);
  report.lambda = spectral_lambda(p).lambda;

  const int levels = opt.flag_levels;
  std::vector<Eigen::VectorXcd> branches_all;  // (state, flag) pointer states for purity
  std::vector<double> weights;
  for (int s = 0; s < p.size(); ++s) {
    const double energy = p.eigen.values(s);
    const Eigen::VectorXcd moved = translate(psi0, energy);
    std::vector<Eigen::VectorXcd> branch(levels, Eigen::VectorXcd::Zero(n));
    branch[opt.initial_flag] = moved;
    std::vector<Eigen::VectorXcd> after(levels, Eigen::VectorXcd::Zero(n));
    for (int f = 0; f < levels; ++f) {
      after[(f + 1) % levels].array() += mask * branch[f].array();
      after[f].array() += (1.0 - mask) * branch[f].array();
    }
    EigenstateCheck check;
    check.energy = energy;
    check.in_window = p.window.contains(energy);
    const int expected = check.in_window ? (opt.initial_flag + 1) % levels : opt.initial_flag;
    double norm = 0.0;
    const double weight = std::norm(p.input_amplitudes(s));
    for (int f = 0; f < levels; ++f) {
      const Eigen::VectorXcd back = translate(after[f], -energy);
      const double mass = back.squaredNorm();
      norm += mass;
      if (f == expected) check.correct_flag_probability = mass;
      check.pointer_return_fidelity += std::norm(psi0.dot(back));
      report.flag_distribution[f] += weight * mass;
      if (weight > 0.0 && mass > 0.0) {
        branches_all.push_back(back);
        weights.push_back(weight);
      }
    }
    check.norm = norm;
    check.flag_correct = check.correct_flag_probability >= 1.0 - opt.correctness_tolerance;
    report.max_norm_error = std::max(report.max_norm_error, std::abs(norm - 1.0));
    report.states.push_back(check);
  }

  // Reduced pointer state: rho = sum_i w_i |b_i><b_i| over orthogonal (state, flag) labels.
  const int m = static_cast<int>(branches_all.size());
  Eigen::MatrixXcd stacked(n, m);
  for (int i = 0; i < m; ++i) stacked.col(i) = branches_all[i] * std::sqrt(weights[i]);
  const Eigen::MatrixXcd gram = stacked.adjoint() * stacked;
  report.pointer_purity = gram.cwiseAbs2().sum();
  return report;
}

struct GateCheckOptions {
  double sigma_min = 0.4;
  double sigma_max = 0.7;
  double center_fraction = 0.25;  // centers uniform in +-fraction * x_max
  double momentum_max = 1.0;
  int margin_spacings = 4;
  double leakage_limit = 1e-6;
};

struct GateCheckResult {
  double max_infidelity = 0.0;
  bool reliable = true;  // false when a test packet leaks into the grid margin
  int states = 0;
};

/// Applies both sides of exp(-i B (x) p) = exp(-i t2 x^3) exp(-i t1 p (x) p) exp(i t2 x^3)
/// (B = t1 (p + 3 t2 x^2) on mode 1, p on mode 2) to seeded Gaussian product
/// packets and returns the worst infidelity 1 - |<L psi|R psi>|^2.
inline GateCheckResult verify_gate_decomposition(double theta1, double theta2, const ModeGrid& grid, int test_states,
                                                 std::uint64_t seed, const GateCheckOptions& opt = {}) {
  grid.validate();
  detail::require(grid.n_points <= 64, "gate check: n_points must not exceed 64 per mode");
  detail::require(test_states >= 1, "gate check: need at least one test state");

  const int n = grid.n_points;
  const Eigen::VectorXd x = grid.positions();
  const Eigen::VectorXd k = grid.momenta();

  Eigensystem b = diagonalize(discretize_operator({{theta1, 0, 1}, {3.0 * theta1 * theta2, 2, 0}}, grid));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> width(opt.sigma_min, opt.sigma_max);
  std::uniform_real_distribution<double> center(-opt.center_fraction * grid.x_max, opt.center_fraction * grid.x_max);
  std::uniform_real_distribution<double> kick(-opt.momentum_max, opt.momentum_max);

  Eigen::FFT<double> fft;
  // Transforms the columns (mode-1 index fixed) or rows of an n x n state.
  auto transform_mode = [&](Eigen::MatrixXcd& psi, int mode, bool forward) {
    Eigen::VectorXcd in(n), out(n);
    for (int i = 0; i < n; ++i) {
      in = mode == 1 ? Eigen::VectorXcd(psi.col(i)) : Eigen::VectorXcd(psi.row(i).transpose());
      if (forward) detail::fft_forward(fft, in.data(), out.data(), n);
      else detail::fft_inverse(fft, in.data(), out.data(), n);
      if (mode == 1) psi.col(i) = out;
      else psi.row(i) = out.transpose();
    }
  };

  auto packet = [&](double c, double p0, double s) {
    Eigen::VectorXcd v(n);
    for (int j = 0; j < n; ++j) v(j) = std::exp(-(x(j) - c) * (x(j) - c) / (4.0 * s * s)) * std::exp(Complex(0.0, p0 * x(j)));
    return Eigen::VectorXcd(v.normalized());
  };

  GateCheckResult result;
  result.states = test_states;
  for (int t = 0; t < test_states; ++t) {
    const double s1 = width(rng), c1 = center(rng), k1 = kick(rng);
    const double s2 = width(rng), c2 = center(rng), k2 = kick(rng);
    const Eigen::VectorXcd u = packet(c1, k1, s1), v = packet(c2, k2, s2);

    for (const Eigen::VectorXcd* w : {&u, &v}) {
      Eigen::VectorXcd w_hat(n);
      detail::fft_forward(fft, w->data(), w_hat.data(), n);
      w_hat /= w_hat.norm();
      double leak_x = 0.0, leak_p = 0.0;
      for (int j = 0; j < opt.margin_spacings; ++j) {
        leak_x += std::norm((*w)(j)) + std::norm((*w)(n - 1 - j));
        leak_p += std::norm(w_hat(n / 2 - 1 - j)) + std::norm(w_hat(n / 2 + j));
      }
      if (leak_x > opt.leakage_limit || leak_p > opt.leakage_limit) result.reliable = false;
    }

    // psi(j1, j2) = u(j1) v(j2): rows index mode 1, columns mode 2.
    const Eigen::MatrixXcd psi = u * v.transpose();

    Eigen::MatrixXcd lhs = psi;
    transform_mode(lhs, 2, true);
    const Eigen::MatrixXcd rotated = b.vectors.adjoint() * lhs;
    Eigen::MatrixXcd phased(n, n);
    for (int m = 0; m < n; ++m)
      for (int e = 0; e < n; ++e) phased(e, m) = rotated(e, m) * std::exp(Complex(0.0, -k(m) * b.values(e)));
    lhs = b.vectors * phased;
    transform_mode(lhs, 2, false);

    Eigen::MatrixXcd rhs = psi;
    for (int j = 0; j < n; ++j) rhs.row(j) *= std::exp(Complex(0.0, theta2 * x(j) * x(j) * x(j)));
    transform_mode(rhs, 1, true);
    transform_mode(rhs, 2, true);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) rhs(a, c) *= std::exp(Complex(0.0, -theta1 * k(a) * k(c)));
    transform_mode(rhs, 1, false);
    transform_mode(rhs, 2, false);
    for (int j = 0; j < n; ++j) rhs.row(j) *= std::exp(Complex(0.0, -theta2 * x(j) * x(j) * x(j)));

    const Complex overlap = (lhs.conjugate().cwiseProduct(rhs)).sum() / (lhs.norm() * rhs.norm());
    result.max_infidelity = std::max(result.max_infidelity, 1.0 - std::norm(overlap));
  }
  return result;
}

}  // namespace fpcs
