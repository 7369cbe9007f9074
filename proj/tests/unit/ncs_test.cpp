#include <gtest/gtest.h>

#include <cmath>

#include "pdattack/error.hpp"
#include "pdattack/ncs/closed_loop.hpp"
#include "pdattack/ncs/noise.hpp"
#include "pdattack/numkit/linalg.hpp"
#include "test_support.hpp"

namespace pdattack {
namespace {

constexpr double kC = 3.0001;
constexpr double kG = 29.4311 / 3.0001;

PlantModel pendulum() { return PlantModel::pendulum(kC, kG, Mat{{1, 0, 0, 0}, {0, 1, 0, 0}}); }

PlantModel linear_pendulum() {
  return PlantModel::linear(testing::pendulum_A_n(), testing::pendulum_B_n(), Mat{{1, 0, 0, 0}, {0, 1, 0, 0}});
}

SimConfig base_sim() {
  SimConfig s;
  s.t_end = 5.0;
  s.t_f = 5.0;
  s.x0 = Vec{0.05, 0.05, 0, 0};
  s.limits = Vec{0.3, 0.8};
  return s;
}

Vec to_vec(std::span<const double> s) { return Vec(std::vector<double>(s.begin(), s.end())); }

// =============================================================================
// Plant
// =============================================================================

TEST(Plant, LinearZeroStateZeroInput) {
  const Vec dx = plant_derivative(linear_pendulum(), Vec(4), Vec(1));
  EXPECT_EQ(dx.norm(), 0.0);
}

TEST(Plant, PendulumMatchesLinearisationAtUpright) {
  const Vec dx = plant_derivative(pendulum(), Vec(4), Vec{1.0});
  EXPECT_NEAR(dx[3], 3.0001, 1e-12);
  const Vec lin = testing::pendulum_A_n() * Vec(4) + testing::pendulum_B_n() * Vec{1.0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(dx[i], lin[i], 1e-12);
}

TEST(Plant, PendulumNonlinearityAtTenthRadian) {
  const Vec x{0, 0.1, 0, 0};
  const Vec dx = plant_derivative(pendulum(), x, Vec{0.0});
  EXPECT_NEAR(dx[3], kC * kG * std::sin(0.1), 1e-14);
  const double linear = 29.4311 * 0.1;
  EXPECT_NEAR(linear - dx[3], kC * kG * (0.1 - std::sin(0.1)), 1e-12);
}

TEST(Plant, DimensionMismatchThrows) {
  try {
    plant_derivative(pendulum(), Vec(3), Vec{0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
  EXPECT_THROW(PlantModel::linear(Mat::identity(2), Mat(3, 1), Mat::identity(2)), Error);
}

TEST(Plant, LinearisationOfPendulumEqualsNominal) {
  const auto [A, B] = linearize(pendulum());
  EXPECT_LE(testing::max_abs_diff(A, testing::pendulum_A_n()), 1e-12);
  EXPECT_LE(testing::max_abs_diff(B, testing::pendulum_B_n()), 1e-12);
}

TEST(NominalModel, PhiIsDerived) {
  const NominalModel nm(testing::pendulum_A_n(), testing::pendulum_B_n(), testing::pendulum_K_n());
  EXPECT_EQ(nm.Phi_n(), testing::pendulum_A_n() + testing::pendulum_B_n() * testing::pendulum_K_n());
  EXPECT_TRUE(is_hurwitz(nm.Phi_n()));
  EXPECT_THROW(NominalModel(Mat::identity(4), Mat(3, 1), Mat(1, 4)), Error);
}

// =============================================================================
// Controller and detector
// =============================================================================

TEST(Controller, ZeroResidualGivesZeroInput) {
  EXPECT_EQ(controller_output(testing::pendulum_K_n(), Vec(4))[0], 0.0);
}

TEST(Controller, UnitAngleSelectsSecondGain) {
  EXPECT_DOUBLE_EQ(controller_output(testing::pendulum_K_n(), Vec::unit(4, 1))[0], -29.6225);
}

TEST(Controller, Linearity) {
  const Vec v{0.3, -0.2, 0.1, 0.7};
  const Mat K = testing::pendulum_K_n();
  EXPECT_DOUBLE_EQ(controller_output(K, v * 2.0)[0], 2.0 * controller_output(K, v)[0]);
}

TEST(Controller, DimensionMismatchThrows) { EXPECT_THROW(controller_output(testing::pendulum_K_n(), Vec(3)), Error); }

TEST(Detector, ZeroResidualNeverAlarms) {
  DetectorConfig d;
  d.epsilon = 1e-6;
  EXPECT_FALSE(detector_test(Vec(3), d));
}

TEST(Detector, BoundaryCountsAsAlarm) {
  DetectorConfig d;
  d.epsilon = 3.1;
  EXPECT_TRUE(detector_test(Vec{3.1}, d));
  EXPECT_FALSE(detector_test(Vec{3.05}, d));
}

TEST(Config, ValidationRejectsInconsistentTimes) {
  SimConfig s = base_sim();
  s.dt_int = 0.02;
  EXPECT_THROW(s.validate(), Error);
  s = base_sim();
  s.t_f = 6.0;
  EXPECT_THROW(s.validate(), Error);
  s = base_sim();
  s.limits = Vec{0.3, 0.0};
  EXPECT_THROW(s.validate(), Error);
  DetectorConfig d;
  d.epsilon = 0.0;
  EXPECT_THROW(d.validate(), Error);
  NoiseConfig n;
  n.sigma_meas = -1.0;
  EXPECT_THROW(n.validate(), Error);
}

TEST(Noise, SeedReproducesStream) {
  GaussianStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Noise, MomentsAreStandardNormal) {
  GaussianStream g(7);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.next();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

// =============================================================================
// Closed loop
// =============================================================================

TEST(ClosedLoop, AttackFreeDecayWithoutAlarm) {
  const SimTrace tr = run_closed_loop(pendulum(), testing::pendulum_K_n(), std::nullopt, base_sim(), {}, {});
  ASSERT_EQ(tr.size(), 501u);
  EXPECT_FALSE(tr.diverged);
  for (auto a : tr.alarm) EXPECT_EQ(a, 0);
  EXPECT_LE(to_vec(tr.state(tr.size() - 1)).norm(), 1e-3 * base_sim().x0.norm());
}

TEST(ClosedLoop, ClosedLoopMarginSupportsDecay) {
  const ComplexSpectrum s = eig(testing::pendulum_Phi_n());
  EXPECT_LT(s.spectral_abscissa(), -0.4);
}

TEST(ClosedLoop, TraceInvariants) {
  NoiseConfig noise;
  noise.sigma_meas = 0.05;
  noise.seed = 9;
  SimConfig sim = base_sim();
  sim.t0 = 1.0;
  sim.t_f = 3.0;
  const SimTrace tr = run_closed_loop(pendulum(), testing::pendulum_K_n(),
                                      make_tpda_nominal(testing::pendulum_A_n(), Vec::filled(4, 1e-4)), sim, noise, {});
  ASSERT_FALSE(tr.empty());
  EXPECT_EQ(tr.x.size(), tr.size() * 4);
  EXPECT_EQ(tr.a.size(), tr.size() * 4);
  EXPECT_EQ(tr.u.size(), tr.size());
  EXPECT_EQ(tr.z.size(), tr.size() * 2);
  for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_NEAR(tr.times[k] - tr.times[k - 1], sim.h_sample, 1e-12);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    EXPECT_DOUBLE_EQ(tr.residual_norm[k], to_vec(tr.network(k)).norm());
    const bool active = tr.times[k] >= 1.0 - 1e-12 && tr.times[k] < 3.0 - 1e-12;
    if (!active) {
      EXPECT_EQ(to_vec(tr.attack(k)).norm(), 0.0) << "t=" << tr.times[k];
    }
  }
}

TEST(ClosedLoop, InjectionIdentityWithRegeneratedNoise) {
  NoiseConfig noise;
  noise.sigma_meas = 0.1;
  noise.seed = 5;
  const SimTrace tr = run_closed_loop(pendulum(), testing::pendulum_K_n(),
                                      make_tpda_nominal(testing::pendulum_A_n(), Vec::filled(4, 1e-4)), base_sim(),
                                      noise, {});
  GaussianStream g(noise.seed);
  for (std::size_t k = 0; k < tr.size(); ++k)
    for (std::size_t i = 0; i < 4; ++i) {
      const double noisy = tr.state(k)[i] + noise.sigma_meas * g.next();
      EXPECT_EQ(tr.network(k)[i], noisy - tr.attack(k)[i]);
    }
}

TEST(ClosedLoop, DeterministicForSeed) {
  NoiseConfig noise;
  noise.sigma_meas = 0.2;
  noise.seed = 77;
  const auto run = [&] {
    return run_closed_loop(pendulum(), testing::pendulum_K_n(), std::nullopt, base_sim(), noise, {});
  };
  const SimTrace a = run(), b = run();
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.x_a, b.x_a);
  EXPECT_EQ(a.residual_norm, b.residual_norm);
}

TEST(ClosedLoop, EmptyWindowEqualsAttackFree) {
  NoiseConfig noise;
  noise.sigma_meas = 0.1;
  noise.seed = 3;
  SimConfig sim = base_sim();
  sim.t0 = 2.0;
  sim.t_f = 2.0;
  const SimTrace attacked = run_closed_loop(
      pendulum(), testing::pendulum_K_n(), make_tpda_nominal(testing::pendulum_A_n(), Vec::filled(4, 1e-4)), sim, noise, {});
  const SimTrace clean = run_closed_loop(pendulum(), testing::pendulum_K_n(), std::nullopt, sim, noise, {});
  EXPECT_EQ(attacked.x, clean.x);
  EXPECT_EQ(attacked.x_a, clean.x_a);
  EXPECT_EQ(attacked.a, clean.a);
}

TEST(ClosedLoop, ExactAttackResidualFollowsClosedLoopDynamics) {
  SimConfig sim = base_sim();
  sim.x0 = Vec(4);
  sim.h_sample = 1e-4;
  sim.dt_int = 1e-4;
  const Vec aux0 = Vec::filled(4, 1e-4);
  const SimTrace tr = run_closed_loop(linear_pendulum(), testing::pendulum_K_n(),
                                      make_tpda_exact(testing::pendulum_A_n(), aux0), sim, {}, {});
  ASSERT_FALSE(tr.diverged);
  const Mat phi = testing::pendulum_Phi_n();
  const Vec xa0 = to_vec(tr.network(0));
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.size() && tr.times[k] < sim.t_f - 1e-12; k += 100)
    worst = std::max(worst, (to_vec(tr.network(k)) - mat_exp(phi, tr.times[k]) * xa0).norm());
  EXPECT_LE(worst, 1e-6);
}

TEST(ClosedLoop, DivergenceStopsAndFlags) {
  SimConfig sim = base_sim();
  sim.t_end = 20.0;
  sim.t_f = 20.0;
  sim.x0 = Vec(4);
  const SimTrace tr = run_closed_loop(linear_pendulum(), testing::pendulum_K_n(),
                                      make_tpda_exact(testing::pendulum_A_n(), Vec::filled(4, 1e-4)), sim, {}, {});
  EXPECT_TRUE(tr.diverged);
  ASSERT_TRUE(tr.diverge_time.has_value());
  EXPECT_LT(*tr.diverge_time, 20.0);
  EXPECT_GT(to_vec(tr.state(tr.size() - 1)).norm(), 1e8);
}

TEST(ClosedLoop, StopOnLimitEndsAtFirstCrossing) {
  SimConfig sim = base_sim();
  sim.t_end = 10.0;
  sim.t_f = 10.0;
  sim.x0 = Vec(4);
  sim.stop_on_limit = true;
  const SimTrace tr = run_closed_loop(pendulum(), testing::pendulum_K_n(),
                                      make_tpda_nominal(testing::pendulum_A_n(), Vec::filled(4, 1e-4)), sim, {}, {});
  const auto z = tr.output(tr.size() - 1);
  EXPECT_TRUE(std::abs(z[0]) >= 0.3 || std::abs(z[1]) >= 0.8);
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    const auto zk = tr.output(k);
    EXPECT_TRUE(std::abs(zk[0]) < 0.3 && std::abs(zk[1]) < 0.8);
  }
}

TEST(ClosedLoop, DimensionChecks) {
  SimConfig sim = base_sim();
  sim.x0 = Vec(3);
  EXPECT_THROW(run_closed_loop(pendulum(), testing::pendulum_K_n(), std::nullopt, sim, {}, {}), Error);
  EXPECT_THROW(run_closed_loop(pendulum(), Mat(1, 3), std::nullopt, base_sim(), {}, {}), Error);
}

}  // namespace
}  // namespace pdattack
