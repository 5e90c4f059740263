#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fpcs/engine.hpp"
#include "fpcs/spectral.hpp"

namespace fpcs {
namespace {

const OperatorSpec kOscillator{{1.0, 2, 0}, {1.0, 0, 2}};

SpectralProblem oscillator(SpectralWindow w = {0.0, 4.0}) {
  SpectralProblem p = SpectralProblem::build(kOscillator, {256, 8.0}, w);
  p.set_equal_superposition(4);
  return p;
}

TEST(ModeGrid, Geometry) {
  const ModeGrid g{256, 8.0};
  EXPECT_DOUBLE_EQ(g.spacing() * g.n_points, 2 * g.x_max);
  EXPECT_DOUBLE_EQ(g.position(0), -8.0);
  const Eigen::VectorXd p = g.momenta();
  EXPECT_DOUBLE_EQ(p(1) - p(0), std::numbers::pi / g.x_max);
  EXPECT_DOUBLE_EQ(p(128), -128 * std::numbers::pi / 8.0);
  EXPECT_THROW((ModeGrid{100, 8.0}.validate()), ParameterError);
  EXPECT_THROW((ModeGrid{64, 0.0}.validate()), ParameterError);
}

TEST(Discretize, OscillatorSpectrum) {
  const Eigensystem es = diagonalize(discretize_operator(kOscillator, {256, 8.0}));
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(es.values(k), 2 * k + 1, 1e-6) << k;
}

TEST(Discretize, GridConvergence) {
  const Eigensystem a = diagonalize(discretize_operator(kOscillator, {256, 8.0}));
  const Eigensystem b = diagonalize(discretize_operator(kOscillator, {512, 8.0}));
  for (int k = 0; k < 10; ++k) EXPECT_LT(std::abs(a.values(k) - b.values(k)), 1e-6);
}

TEST(Discretize, PositionIsDiagonal) {
  const ModeGrid g{64, 3.0};
  const Eigen::MatrixXcd x = discretize_operator({{1.0, 1, 0}}, g);
  const Eigensystem es = diagonalize(x);
  const Eigen::VectorXd pos = g.positions();
  for (int j = 0; j < 64; ++j) EXPECT_EQ(es.values(j), pos(j));
}

TEST(Discretize, HermitianWithRealSpectrumForMixedTerms) {
  const ModeGrid g{128, 6.0};
  const OperatorSpec mixed{{0.5, 1, 1}, {0.2, 2, 1}, {1.0, 0, 2}, {0.1, 4, 0}, {0.3, 3, 2}};
  const Eigen::MatrixXcd m = discretize_operator(mixed, g);
  EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> general(m);
  EXPECT_LT(general.eigenvalues().imag().cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Discretize, WeylOrderingOfXP) {
  // W(xp) = (xP + Px)/2, so W(xp) - x P must equal [P, x]/2 = -i/2 on smooth states.
  const ModeGrid g{256, 10.0};
  const Eigen::MatrixXcd w = discretize_operator({{1.0, 1, 1}}, g);
  const Eigen::MatrixXcd p = discretize_operator({{1.0, 0, 1}}, g);
  const Eigen::VectorXd x = g.positions();
  Eigen::VectorXcd psi(256);
  for (int j = 0; j < 256; ++j) psi(j) = std::exp(-x(j) * x(j) / 2.0);
  psi.normalize();
  const Eigen::VectorXcd diff = w * psi - x.asDiagonal() * (p * psi);
  EXPECT_LT((diff - Complex(0.0, -0.5) * psi).norm(), 1e-8);
}

TEST(Discretize, MomentumSquaredEigenvectorsHaveDefiniteParity) {
  const Eigensystem es = diagonalize(discretize_operator({{1.0, 0, 2}}, {256, 8.0}));
  for (int c = 0; c < 256; ++c) EXPECT_NEAR(std::abs(parity_expectation(es.vectors.col(c))), 1.0, 1e-8) << c;
}

TEST(Discretize, Limits) {
  EXPECT_THROW(discretize_operator({{1.0, 5, 0}}, {64, 3.0}), ParameterError);
  EXPECT_THROW(discretize_operator({{1.0, 0, 2}}, {2048, 3.0}), ParameterError);
  EXPECT_THROW(discretize_operator({}, {64, 3.0}), ParameterError);
}

TEST(Retained, DropsEdgeArtifacts) {
  const SpectralProblem p = oscillator();
  EXPECT_GE(p.size(), 10);
  EXPECT_LE(p.size(), kMaxRetainedEigenpairs);
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(p.eigen.values(k), 2 * k + 1, 1e-6);
  const SpectralProblem x = SpectralProblem::build({{1.0, 1, 0}}, {64, 3.0}, {0.0, 1.0});
  // Position eigenvectors are grid deltas; the outer 5% per side (3 points of 64) must be dropped.
  for (int k = 0; k < x.size(); ++k) EXPECT_LE(std::abs(x.eigen.values(k)), 3.0 - 3 * x.grid.spacing());
}

TEST(SpectralLambda, Examples) {
  SpectralProblem p = oscillator();
  EXPECT_NEAR(spectral_lambda(p).lambda, 0.5, 1e-12);
  EXPECT_EQ(spectral_lambda(p).states_in_window, 2);
  p.window = {-100.0, 1000.0};
  EXPECT_NEAR(spectral_lambda(p).lambda, 1.0, 1e-12);
  p.window = {0.0, 4.0};
  Eigen::VectorXcd single = Eigen::VectorXcd::Zero(p.size());
  single(1) = Complex(0.0, 1.0);
  p.set_amplitudes(single);
  EXPECT_NEAR(spectral_lambda(p).lambda, 1.0, 1e-12);
}

TEST(SpectralLambda, EmptyWindowWarns) {
  SpectralProblem p = oscillator({100.0, 200.0});
  const SpectralLambda l = spectral_lambda(p);
  EXPECT_EQ(l.lambda, 0.0);
  EXPECT_TRUE(l.empty_window);
}

TEST(SpectralLambda, BoundaryTiesCountInside) {
  SpectralProblem p = oscillator();
  p.window = {p.eigen.values(1) + 5e-10, p.eigen.values(2) - 5e-10};
  EXPECT_NEAR(spectral_lambda(p).lambda, 0.5, 1e-12);
}

TEST(SpectralLambda, AdditiveOverDisjointWindows) {
  SpectralProblem p = oscillator();
  p.set_equal_superposition(8);
  const auto lam = [&](double a, double b) { return spectral_lambda(p.eigen.values, p.input_amplitudes, {a, b}).lambda; };
  EXPECT_NEAR(lam(0.0, 6.0) + lam(6.0 + 1e-6, 12.0), lam(0.0, 12.0), 1e-12);
}

TEST(PostSearch, Examples) {
  SpectralProblem p = oscillator();
  const double lambda = spectral_lambda(p).lambda;

  const Eigen::VectorXcd perfect = post_search_distribution(p, TwoLevelState{0.0, 1.0});
  EXPECT_NEAR(in_window_mass(p, perfect), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(perfect(0)), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(std::abs(perfect(1)), 1 / std::sqrt(2.0), 1e-12);

  const Eigen::VectorXcd untouched = post_search_distribution(p, initial_state(lambda));
  EXPECT_LT((untouched - p.input_amplitudes).norm(), 1e-12);

  const int q = *minimal_queries(lambda, 0.1);
  TwoLevelState s = initial_state(lambda);
  const AngleSchedule sched = build_schedule(q, 0.1);
  for (int j = 0; j < q; ++j) s = apply_iteration(s, sched.alphas[j], sched.betas[j], lambda);
  const Eigen::VectorXcd after = post_search_distribution(p, s);
  EXPECT_NEAR(after.norm(), 1.0, 1e-10);
  double direct = 0.0;
  for (int k = 0; k < p.size(); ++k)
    if (p.eigen.values(k) >= 0.0 && p.eigen.values(k) <= 4.0) direct += std::norm(after(k));
  EXPECT_NEAR(in_window_mass(p, after), direct, 1e-15);
  EXPECT_NEAR(direct, s.success_probability(), 1e-12);
  EXPECT_GE(direct, 0.9);
}

TEST(PostSearch, DegenerateLambdaReturnsInput) {
  SpectralProblem p = oscillator({-1.0, 100.0});
  const Eigen::VectorXcd out = post_search_distribution(p, TwoLevelState{0.3, 0.7});
  EXPECT_LT((out - p.input_amplitudes).norm(), 1e-15);
}

TEST(OraclePipeline, FlagsFidelityAndPurity) {
  const SpectralProblem p = oscillator();
  const PipelineReport r = simulate_oracle_pipeline(p);
  ASSERT_EQ(static_cast<int>(r.states.size()), p.size());
  EXPECT_GE(r.pointer.x_max, 1.2 * p.eigen.values.maxCoeff());
  for (const EigenstateCheck& s : r.states) {
    EXPECT_TRUE(s.flag_correct) << s.energy;
    EXPECT_GE(s.pointer_return_fidelity, 1 - 1e-6) << s.energy;
    EXPECT_NEAR(s.norm, 1.0, 1e-10);
    if (!s.in_window) EXPECT_EQ(s.correct_flag_probability, s.norm);
  }
  EXPECT_TRUE(r.all_flags_correct());
  EXPECT_NEAR(r.flag_distribution[0], 1 - spectral_lambda(p).lambda, 1e-6);
  EXPECT_NEAR(r.flag_distribution[1], spectral_lambda(p).lambda, 1e-6);
  EXPECT_NEAR(r.flag_distribution[2] + r.flag_distribution[3], 0.0, 1e-12);
  EXPECT_GE(r.pointer_purity, 1 - 1e-6);
  EXPECT_LT(r.max_norm_error, 1e-10);
}

TEST(OraclePipeline, ModularFlagWraps) {
  const SpectralProblem p = oscillator();
  PipelineOptions opt;
  opt.flag_levels = 2;
  opt.initial_flag = 1;
  const PipelineReport r = simulate_oracle_pipeline(p, opt);
  EXPECT_TRUE(r.all_flags_correct());
  EXPECT_NEAR(r.flag_distribution[0], 0.5, 1e-6);
}

TEST(OraclePipeline, PointerWindowTooSmall) {
  const SpectralProblem p = oscillator();
  PipelineOptions opt;
  opt.pointer_x_max = 10.0;
  EXPECT_THROW(simulate_oracle_pipeline(p, opt), ParameterError);
  opt.pointer_x_max.reset();
  opt.flag_levels = 1;
  EXPECT_THROW(simulate_oracle_pipeline(p, opt), ParameterError);
}

TEST(GateDecomposition, TrivialCases) {
  const ModeGrid g{64, 5.0};
  const GateCheckResult no_cubic = verify_gate_decomposition(0.3, 0.0, g, 5, 1);
  EXPECT_LE(no_cubic.max_infidelity, 1e-12);
  EXPECT_LE(verify_gate_decomposition(0.0, 0.2, g, 5, 1).max_infidelity, 1e-12);
  EXPECT_TRUE(no_cubic.reliable);
}

TEST(GateDecomposition, RandomPackets) {
  const GateCheckResult r = verify_gate_decomposition(0.3, 0.2, {64, 5.0}, 10, 7);
  EXPECT_EQ(r.states, 10);
  EXPECT_TRUE(r.reliable);
  EXPECT_LE(r.max_infidelity, 1e-6);
}

TEST(GateDecomposition, FlagsLeakyPackets) {
  GateCheckOptions opt;
  opt.center_fraction = 0.9;
  const GateCheckResult r = verify_gate_decomposition(0.3, 0.2, {64, 5.0}, 10, 7, opt);
  EXPECT_FALSE(r.reliable);
  EXPECT_THROW(verify_gate_decomposition(0.3, 0.2, {128, 5.0}, 1, 7), ParameterError);
}

}  // namespace
}  // namespace fpcs
