#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pdattack/attacks/engine.hpp"
#include "pdattack/ncs/config.hpp"
#include "pdattack/ncs/plant.hpp"

namespace pdattack {

/// Per-sample record of one closed-loop run, stored as flat row-major
/// arrays (one row per sample instant).
struct SimTrace {
  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;

  std::vector<double> times;
  std::vector<double> x;    // true state
  std::vector<double> a;    // injected attack
  std::vector<double> x_a;  // network output = x + noise − a
  std::vector<double> u;
  std::vector<double> z;
  std::vector<double> residual_norm;
  std::vector<std::uint8_t> alarm;
  /// F_a(t_k) row-major p×p, recorded before the sample's update; empty
  /// unless the attack carries an adaptive gain.
  std::vector<double> adaptive_gain;

  bool diverged = false;
  std::optional<double> diverge_time;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }

  std::span<const double> state(std::size_t k) const { return row(x, state_dim, k); }
  std::span<const double> attack(std::size_t k) const { return row(a, state_dim, k); }
  std::span<const double> network(std::size_t k) const { return row(x_a, state_dim, k); }
  std::span<const double> control(std::size_t k) const { return row(u, input_dim, k); }
  std::span<const double> output(std::size_t k) const { return row(z, output_dim, k); }
  Mat gain(std::size_t k) const;

 private:
  static std::span<const double> row(const std::vector<double>& v, std::size_t width, std::size_t k) {
    return {v.data() + k * width, width};
  }
};

/// Divergence sentinel on ‖x‖; runs stop and are flagged once it is passed.
inline constexpr double kStateSentinel = 1e9;

/// Sampled-data loop with zero-order hold. At each sample t_k = k·h:
///   1. x_noisy = x + n (Gaussian, seeded)
///   2. a = engine output inside [t0, t_f), else 0
///   3. x_a = x_noisy − a; alarm iff ‖x_a‖ ≥ ε
///   4. u = K·x_a, held over [t_k, t_k + h)
///   5. engine advanced with x_a; plant integrated by RK4 at dt_int.
/// The engine is consumed (its state evolves); pass std::nullopt for an
/// attack-free run.
SimTrace run_closed_loop(const PlantModel& plant, const Mat& K, std::optional<AttackEngine> attack,
                         const SimConfig& sim, const NoiseConfig& noise, const DetectorConfig& det);

/// ‖x_a‖ ≥ ε.
bool detector_test(const Vec& x_a, const DetectorConfig& det);

}  // namespace pdattack
