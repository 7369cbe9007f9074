#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "pdattack/analysis/calibration.hpp"
#include "pdattack/analysis/certificates.hpp"
#include "pdattack/analysis/initial_condition.hpp"
#include "pdattack/analysis/outcome.hpp"
#include "pdattack/attacks/engine.hpp"
#include "pdattack/error.hpp"
#include "pdattack/numkit/linalg.hpp"
#include "test_support.hpp"

namespace pdattack {
namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no pdattack::Error thrown";
  return ErrorKind::InvalidArgument;
}

Mat diag(std::initializer_list<double> d) {
  Mat m(d.size(), d.size());
  std::size_t i = 0;
  for (double v : d) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

// Orthogonal matrix from Gram-Schmidt on a random square matrix.
Mat random_orthogonal(std::mt19937_64& rng, std::size_t n) {
  const Mat g = testing::random_matrix(rng, n, n, 1.0);
  Mat q(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = g(i, j);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += q(i, k) * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= d * q(i, k);
      }
    const double nv = v.norm();
    for (std::size_t i = 0; i < n; ++i) q(i, j) = v[i] / nv;
  }
  return q;
}

// =============================================================================
// Initial-condition check
// =============================================================================

TEST(InitialCondition, StableDistinctSpectrumAlwaysSatisfies) {
  const auto r = check_initial_condition(diag({-1, -2}), Vec{3.0, -7.0});
  EXPECT_TRUE(r.satisfies_condition);
  EXPECT_TRUE(r.violating_indices.empty());
  EXPECT_EQ(r.eigen_report.size(), 2u);
  for (const auto& c : r.eigen_report) EXPECT_EQ(c.half_plane, HalfPlane::OpenLeft);
}

TEST(InitialCondition, SaddleDependsOnUnstableComponent) {
  const Mat M = diag({1, -1});
  const auto good = check_initial_condition(M, Vec{0.0, 5.0});
  const auto bad = check_initial_condition(M, Vec{5.0, 0.0});
  EXPECT_TRUE(good.satisfies_condition);
  EXPECT_FALSE(bad.satisfies_condition);
  EXPECT_LT((mat_exp(M, 10.0) * Vec{0.0, 5.0}).norm(), 1e3);
  EXPECT_GT((mat_exp(M, 10.0) * Vec{5.0, 0.0}).norm(), 1e3);
}

TEST(InitialCondition, PendulumWithSuppliedDecomposition) {
  const Mat X{{1, 0, 0, 0}, {0, 0, 0.5, 0.5}, {0, 1, 0, 0}, {0, 0, -2.7125, 2.7125}};
  const Mat J{{0, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, -5.425, 0}, {0, 0, 0, 5.425}};
  const auto r = check_initial_condition(testing::pendulum_A_n(), Vec::filled(4, 1e-4), X, J, 1e-4);
  EXPECT_FALSE(r.satisfies_condition);
  EXPECT_LE((X * r.psi0 - Vec::filled(4, 1e-4)).norm(), 1e-18);
  EXPECT_NEAR(r.psi0[2], 1e-4 - 0.5e-4 / 2.7125, 1e-15);
  EXPECT_NEAR(r.psi0[3], 1e-4 + 0.5e-4 / 2.7125, 1e-15);
  EXPECT_NEAR(r.psi0[0], 1e-4, 1e-15);
  EXPECT_NEAR(r.psi0[1], 1e-4, 1e-15);
  EXPECT_NEAR(r.psi0[2] + r.psi0[3], 2e-4, 1e-15);
  ASSERT_EQ(r.eigen_report.size(), 3u);
  EXPECT_EQ(r.eigen_report[0].multiplicity, 2);
  EXPECT_TRUE(r.eigen_report[0].defective);
  EXPECT_EQ(r.eigen_report[0].half_plane, HalfPlane::ImaginaryAxis);
  EXPECT_EQ(r.eigen_report[2].half_plane, HalfPlane::OpenRight);
  EXPECT_EQ(r.violating_indices, (std::vector<std::size_t>{1, 3}));
}

TEST(InitialCondition, DefectiveWithoutDecompositionFails) {
  const Mat jordan{{-1, 1}, {0, -1}};
  EXPECT_EQ(kind_of([&] { check_initial_condition(jordan, Vec{1.0, 1.0}); }), ErrorKind::DecompositionFailed);
  EXPECT_EQ(kind_of([&] { check_initial_condition(testing::pendulum_A_n(), Vec::filled(4, 1.0)); }),
            ErrorKind::DecompositionFailed);
}

TEST(InitialCondition, StableJordanChainNeedsTrailingZero) {
  const Mat jordan{{-1, 1}, {0, -1}};
  const Mat I = Mat::identity(2);
  EXPECT_TRUE(check_initial_condition(jordan, Vec{1.0, 0.0}, I, jordan).satisfies_condition);
  const auto r = check_initial_condition(jordan, Vec{1.0, 1.0}, I, jordan);
  EXPECT_FALSE(r.satisfies_condition);
  EXPECT_EQ(r.violating_indices, (std::vector<std::size_t>{1}));
}

TEST(InitialCondition, SuppliedDecompositionMustReproduceMatrix) {
  EXPECT_EQ(kind_of([] { check_initial_condition(diag({1, -1}), Vec{1, 1}, Mat::identity(2), diag({1, -2})); }),
            ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { check_initial_condition(diag({1, -1}), Vec{1, 1}, Mat::identity(2), std::nullopt); }),
            ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { check_initial_condition(diag({1, -1}), Vec{1, 1, 1}); }), ErrorKind::DimensionMismatch);
}

TEST(InitialCondition, ComplexPairUsesRealBlocks) {
  const Mat M{{0.5, 2.0}, {-2.0, 0.5}};
  const auto [X, J] = real_diagonal_decomposition(M);
  EXPECT_LE(testing::max_abs_diff(X * J * inverse(X), M), 1e-12);
  EXPECT_NEAR(J(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(std::abs(J(0, 1)), 2.0, 1e-12);
  const auto r = check_initial_condition(M, Vec{1e-3, 0.0});
  EXPECT_FALSE(r.satisfies_condition);
  ASSERT_EQ(r.eigen_report.size(), 1u);
  EXPECT_EQ(r.eigen_report[0].indices.size(), 2u);
}

TEST(InitialCondition, BiconditionalAgainstExponentialOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> stable(-2.0, -1.0), unstable(0.5, 1.0), freq(0.5, 3.0), coin(0.0, 1.0);
  int satisfied = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Mat D(4, 4);
    std::vector<bool> unstable_idx(4, false);
    std::size_t i = 0;
    double slowest = 1e9;
    while (i < 4) {
      const bool grows = coin(rng) < 0.4;
      const double re = grows ? unstable(rng) : stable(rng);
      if (!grows) slowest = std::min(slowest, -re);
      if (i + 1 < 4 && coin(rng) < 0.4) {
        const double w = freq(rng);
        D(i, i) = D(i + 1, i + 1) = re;
        D(i, i + 1) = w;
        D(i + 1, i) = -w;
        unstable_idx[i] = unstable_idx[i + 1] = grows;
        i += 2;
      } else {
        D(i, i) = re;
        unstable_idx[i] = grows;
        i += 1;
      }
    }
    const Mat Q = random_orthogonal(rng, 4);
    const Mat M = Q * D * Q.transpose();
    Vec psi = testing::random_vector(rng, 4, 1.0);
    if (coin(rng) < 0.5)
      for (std::size_t k = 0; k < 4; ++k)
        if (unstable_idx[k]) psi[k] = 0.0;
    const Vec x0 = Q * psi;
    const auto r = check_initial_condition(M, x0);
    if (x0.norm() == 0.0) continue;
    const double t = 20.0 / std::min(slowest, 2.0);
    const bool decays = (mat_exp(M, t) * x0).norm() <= 1e-6 * x0.norm();
    EXPECT_EQ(r.satisfies_condition, decays) << "trial " << trial;
    satisfied += r.satisfies_condition ? 1 : 0;
  }
  EXPECT_GT(satisfied, 5);
  EXPECT_LT(satisfied, 45);
}

// =============================================================================
// Certificates
// =============================================================================

TEST(Certificate, OwnLyapunovSolutionCertifies) {
  const Mat P = solve_lyapunov(testing::pendulum_Phi_n(), Mat::identity(4));
  const auto r = verify_lyapunov_certificate(testing::pendulum_Phi_n(), P);
  EXPECT_TRUE(r.negative_definite);
  EXPECT_NEAR(r.lambda_max, -1.0, 1e-8);
}

TEST(Certificate, UnstableIdentityFails) {
  const auto r = verify_lyapunov_certificate(Mat::identity(3), Mat::identity(3));
  EXPECT_FALSE(r.negative_definite);
  EXPECT_NEAR(r.lambda_max, 2.0, 1e-12);
}

TEST(Certificate, AsymmetricPRejected) {
  EXPECT_EQ(kind_of([] { verify_lyapunov_certificate(Mat::identity(2) * -1.0, Mat{{1, 0.5}, {0, 1}}); }),
            ErrorKind::Asymmetric);
}

TEST(Certificate, PerturbationMarginIsPositiveAndFinite) {
  std::mt19937_64 rng(17);
  const Mat phi = testing::pendulum_Phi_n();
  const Mat P = testing::reference_P();
  const Mat direction = testing::random_matrix(rng, 4, 4, 1.0);
  const double unit = phi.frobenius_norm() / direction.frobenius_norm();
  const auto holds = [&](double scale) {
    return verify_lyapunov_certificate(phi + direction * (scale * unit), P).negative_definite;
  };
  ASSERT_TRUE(holds(0.0));
  ASSERT_FALSE(holds(1.0));
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  EXPECT_GT(lo, 1e-4);
  EXPECT_LT(lo, 1e-2);
  for (double f : {0.1, 0.5, 0.9}) EXPECT_TRUE(holds(f * lo)) << f;
  for (double f : {1.1, 2.0, 10.0}) EXPECT_FALSE(holds(f * lo)) << f;
}

TEST(LyapunovValue, MatchesDirectFormula) {
  std::mt19937_64 rng(4);
  const Vec xa = testing::random_vector(rng, 3, 1.0);
  const Mat F = testing::random_matrix(rng, 3, 3, 1.0);
  const Mat An = testing::random_matrix(rng, 3, 3, 1.0);
  const Mat A = testing::random_matrix(rng, 3, 3, 1.0);
  const Mat P = Mat::identity(3) * 2.0;
  const Mat Z = diag({2.0, 4.0, 0.5});
  const Mat Fd = F + An - A;
  double tr = 0.0;
  const double zinv[3] = {0.5, 0.25, 2.0};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) tr += Fd(i, j) * Fd(i, j) * zinv[i];
  EXPECT_NEAR(lyapunov_value(xa, P, F, An, A, Z), 2.0 * xa.dot(xa) + tr, 1e-12);
}

TEST(Omega, ScalarHandExpansion) {
  const double a = 0.7, bk = -1.3, h = 0.2;
  const Mat one = Mat::identity(1);
  const Mat omega = assemble_omega(one * a, one, one * bk, one, one, one, one, h);
  const Mat expected{{2 * a + 2 + h * h * a * a - 1, bk + h * h * a * bk, 1},
                     {bk + h * h * a * bk, -1 + h * h * bk * bk, 0},
                     {1, 0, -2}};
  EXPECT_LE(testing::max_abs_diff(omega, expected), 1e-12);
}

TEST(Omega, SymmetricAndLinearInP2) {
  std::mt19937_64 rng(6);
  const Mat A = testing::pendulum_A_n(), B = testing::pendulum_B_n(), K = testing::pendulum_K_n();
  const Mat R = testing::random_matrix(rng, 4, 4, 0.1);
  const Mat P2 = Mat::identity(4) * 0.1 + R * R.transpose();
  const Mat o1 = assemble_omega(A, B, K, testing::reference_P(), P2, P2, Mat::identity(4) * 0.01, 1e-3);
  const Mat o2 = assemble_omega(A, B, K, testing::reference_P(), P2 * 2.0, P2, Mat::identity(4) * 0.01, 1e-3);
  EXPECT_EQ(o1, o1.transpose());
  Mat diff_expected(12, 12);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      diff_expected(i, j) = P2(i, j);
      diff_expected(4 + i, 4 + j) = -P2(i, j);
    }
  EXPECT_LE(testing::max_abs_diff(o2 - o1, diff_expected), 1e-12);
}

TEST(Omega, UndelayedLimitKeepsLyapunovBlock) {
  const Mat A = testing::pendulum_A_n(), B = testing::pendulum_B_n(), K = testing::pendulum_K_n();
  const Mat P1 = testing::reference_P();
  const Mat tiny = Mat::identity(4) * 1e-12;
  const Mat omega = assemble_omega(A, B, K, P1, tiny, tiny, tiny, 0.0);
  const Mat lyap = A.transpose() * P1 + P1 * A;
  EXPECT_LE(testing::max_abs_diff(omega.block(0, 0, 4, 4), lyap), 1e-10);
}

TEST(Omega, RejectsIndefiniteAndMismatched) {
  const Mat one = Mat::identity(1);
  EXPECT_EQ(kind_of([&] { assemble_omega(one, one, one, one, one * -1.0, one, one, 0.1); }),
            ErrorKind::NotPositiveDefinite);
  EXPECT_EQ(kind_of([&] { assemble_omega(one, one, one, Mat::identity(2), one, one, one, 0.1); }),
            ErrorKind::DimensionMismatch);
}

TEST(Omega, DefinitenessExamples) {
  EXPECT_TRUE(omega_is_negative_definite(Mat::identity(12) * -1.0).negative_definite);
  Mat m = Mat::identity(12) * -1.0;
  m(11, 11) = 0.1;
  const auto r = omega_is_negative_definite(m);
  EXPECT_FALSE(r.negative_definite);
  EXPECT_NEAR(r.lambda_max, 0.1, 1e-12);
  EXPECT_EQ(kind_of([] { omega_is_negative_definite(Mat{{-1, 1}, {0, -1}}); }), ErrorKind::Asymmetric);
}

// =============================================================================
// Outcome
// =============================================================================

SimConfig window_sim() {
  SimConfig s;
  s.t_end = 1.0;
  s.t_f = 1.0;
  s.h_sample = 0.1;
  s.dt_int = 0.1;
  s.limits = Vec{1.0};
  s.x0 = Vec(1);
  return s;
}

SimTrace synthetic(const std::vector<double>& residual, const std::vector<double>& z) {
  SimTrace tr;
  tr.state_dim = 1;
  tr.input_dim = 1;
  tr.output_dim = 1;
  for (std::size_t k = 0; k < residual.size(); ++k) {
    tr.times.push_back(0.1 * static_cast<double>(k));
    tr.x.push_back(z[k]);
    tr.a.push_back(0.0);
    tr.x_a.push_back(residual[k]);
    tr.u.push_back(0.0);
    tr.z.push_back(z[k]);
    tr.residual_norm.push_back(std::abs(residual[k]));
    tr.alarm.push_back(0);
  }
  return tr;
}

TEST(Outcome, ZeroTraceIsIneffective) {
  const auto o = evaluate_outcome(synthetic(std::vector<double>(11, 0.0), std::vector<double>(11, 0.0)),
                                  DetectorConfig{}, window_sim());
  EXPECT_TRUE(o.stealthy_over_window);
  EXPECT_FALSE(o.destructive);
  EXPECT_EQ(o.classification, Classification::Ineffective);
  EXPECT_FALSE(o.detection_time);
  EXPECT_FALSE(o.mapda_type);
}

TEST(Outcome, ClassificationLadder) {
  DetectorConfig det;
  det.epsilon = 1.0;
  std::vector<double> z(11, 0.0);
  std::vector<double> res(11, 0.5);
  z[10] = 1.2;
  z[9] = 1.1;
  EXPECT_EQ(evaluate_outcome(synthetic(res, z), det, window_sim()).classification, Classification::Ideal);
  z[9] = z[10] = 0.85;
  EXPECT_EQ(evaluate_outcome(synthetic(res, z), det, window_sim()).classification, Classification::QuasiIdeal);
  z[9] = z[10] = 0.5;
  EXPECT_EQ(evaluate_outcome(synthetic(res, z), det, window_sim()).classification, Classification::Ineffective);
  res[4] = 1.0;
  const auto o = evaluate_outcome(synthetic(res, z), det, window_sim());
  EXPECT_EQ(o.classification, Classification::Detected);
  EXPECT_FALSE(o.stealthy_over_window);
  ASSERT_TRUE(o.detection_time);
  EXPECT_NEAR(*o.detection_time, 0.4, 1e-12);
}

TEST(Outcome, WindowExcludesSamplesOutsideInjection) {
  DetectorConfig det;
  det.epsilon = 1.0;
  SimConfig sim = window_sim();
  sim.t0 = 0.3;
  sim.t_f = 0.7;
  std::vector<double> res(11, 0.2);
  res[1] = 5.0;
  res[7] = 5.0;
  const auto o = evaluate_outcome(synthetic(res, std::vector<double>(11, 0.0)), det, sim);
  EXPECT_TRUE(o.stealthy_over_window);
  EXPECT_DOUBLE_EQ(o.sup_residual, 0.2);
}

TEST(Outcome, LimitCrossingScansWholeTrace) {
  std::vector<double> z(11, 0.0);
  z[2] = -1.0;
  const auto o = evaluate_outcome(synthetic(std::vector<double>(11, 0.0), z), DetectorConfig{}, window_sim());
  ASSERT_TRUE(o.limit_cross_time);
  EXPECT_NEAR(*o.limit_cross_time, 0.2, 1e-12);
}

TEST(Outcome, DivergenceIsDestructive) {
  SimTrace tr = synthetic(std::vector<double>(5, 0.0), std::vector<double>(5, 0.0));
  tr.diverged = true;
  tr.diverge_time = 0.4;
  const auto o = evaluate_outcome(tr, DetectorConfig{}, window_sim());
  EXPECT_TRUE(o.destructive);
  EXPECT_EQ(o.classification, Classification::Ideal);
}

TEST(Outcome, MapdaTypeRelativeToThreshold) {
  DetectorConfig det;
  det.epsilon = 1.0;
  const auto type_for = [&](double sup) {
    SimTrace tr = synthetic(std::vector<double>(11, sup), std::vector<double>(11, 0.0));
    tr.adaptive_gain.assign(11, 0.0);
    return evaluate_outcome(tr, det, window_sim()).mapda_type;
  };
  EXPECT_EQ(type_for(0.5), MapdaType::Descending);
  EXPECT_EQ(type_for(0.995), MapdaType::Peak);
  EXPECT_EQ(type_for(1.005), MapdaType::Peak);
  EXPECT_EQ(type_for(2.0), MapdaType::Climbing);
}

TEST(Outcome, EmptyTraceRejected) {
  EXPECT_EQ(kind_of([] { evaluate_outcome(SimTrace{}, DetectorConfig{}, window_sim()); }), ErrorKind::EmptyTrace);
}

TEST(Outcome, RescanConsistencyOnSimulatedRuns) {
  const PlantModel plant = PlantModel::pendulum(3.0001, 29.4311 / 3.0001, Mat{{1, 0, 0, 0}, {0, 1, 0, 0}});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig sim;
    sim.t_end = 6.0;
    sim.t0 = 1.0;
    sim.t_f = 5.0;
    sim.x0 = Vec(4);
    sim.limits = Vec{0.3, 0.8};
    NoiseConfig noise;
    noise.sigma_meas = 0.05 * static_cast<double>(seed);
    noise.seed = seed;
    DetectorConfig det;
    det.epsilon = 3.1;
    const SimTrace tr = run_closed_loop(plant, testing::pendulum_K_n(),
                                        make_tpda_nominal(testing::pendulum_A_n(), Vec::filled(4, 1e-4)), sim, noise, det);
    const Outcome o = evaluate_outcome(tr, det, sim);
    EXPECT_EQ(o.stealthy_over_window, !o.detection_time.has_value());
    if (!o.detection_time) {
      for (std::size_t k = 0; k < tr.size(); ++k)
        if (tr.times[k] >= sim.t0 && tr.times[k] < sim.t_f) {
          EXPECT_LT(tr.residual_norm[k], det.epsilon);
        }
    }
    EXPECT_EQ(o.classification == Classification::Detected, o.detection_time.has_value());
  }
}

// =============================================================================
// Calibration
// =============================================================================

CalibrationScenario calibration_scenario(double t_end) {
  CalibrationScenario s{PlantModel::pendulum(3.0001, 29.4311 / 3.0001, Mat{{1, 0, 0, 0}, {0, 1, 0, 0}}),
                        testing::pendulum_K_n(), SimConfig{}};
  s.sim.t_end = t_end;
  s.sim.t_f = t_end;
  s.sim.x0 = Vec{0.05, 0.05, 0, 0};
  s.sim.limits = Vec{0.3, 0.8};
  return s;
}

TEST(Calibration, ZeroNoiseIsDeterministic) {
  NoiseConfig noise;
  noise.seed = 1;
  const auto r = calibrate_threshold(calibration_scenario(4.0), 4, noise, 1.0);
  ASSERT_EQ(r.sup_samples.size(), 4u);
  EXPECT_EQ(r.std, 0.0);
  EXPECT_EQ(r.epsilon, r.mean);
  EXPECT_EQ(r.seeds, (std::vector<std::uint64_t>{1, 2, 3, 4}));
}

TEST(Calibration, ThreeSigmaOfSamples) {
  NoiseConfig noise;
  noise.sigma_meas = 0.1;
  noise.seed = 40;
  const auto r = calibrate_threshold(calibration_scenario(4.0), 20, noise, 1.0);
  double mean = 0.0;
  for (double s : r.sup_samples) mean += s;
  mean /= 20.0;
  double var = 0.0;
  for (double s : r.sup_samples) var += (s - mean) * (s - mean);
  const double sd = std::sqrt(var / 20.0);
  EXPECT_NEAR(r.mean, mean, 1e-12);
  EXPECT_NEAR(r.std, sd, 1e-12);
  EXPECT_NEAR(r.epsilon, mean + 3.0 * sd, 1e-12);
  EXPECT_GE(r.epsilon, r.mean);
}

TEST(Calibration, RejectsTooFewRuns) {
  EXPECT_EQ(kind_of([] { calibrate_threshold(calibration_scenario(2.0), 1, NoiseConfig{}, 0.5); }),
            ErrorKind::InvalidArgument);
}

TEST(Calibration, ThresholdNonDecreasingInNoise) {
  double previous = 0.0;
  for (double sigma : {0.05, 0.1, 0.2}) {
    NoiseConfig noise;
    noise.sigma_meas = sigma;
    noise.seed = 1000;
    const double eps = calibrate_threshold(calibration_scenario(6.0), 200, noise, 2.0).epsilon;
    EXPECT_GE(eps, previous) << "sigma=" << sigma;
    previous = eps;
  }
}

TEST(Calibration, FalseAlarmRateFallsWithThreshold) {
  NoiseConfig noise;
  noise.sigma_meas = 0.1;
  noise.seed = 500;
  const auto scenario = calibration_scenario(4.0);
  EXPECT_EQ(false_alarm_rate(scenario, 20, noise, 1.0, 1e-6), 1.0);
  EXPECT_EQ(false_alarm_rate(scenario, 20, noise, 1.0, 1e6), 0.0);
}

}  // namespace
}  // namespace pdattack
