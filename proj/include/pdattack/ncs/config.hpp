#pragma once

#include <cstdint>

#include "pdattack/numkit/matrix.hpp"

namespace pdattack {

/// Norm test ‖x_a‖ < ε means "no attack"; samples before settle_time are
/// excluded from calibration statistics.
struct DetectorConfig {
  double epsilon = 3.1;
  double settle_time = 0.0;

  void validate() const;
};

/// Zero-mean Gaussian measurement noise, i.i.d. per channel and sample.
struct NoiseConfig {
  double sigma_meas = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimConfig {
  double t_end = 10.0;
  double dt_int = 1e-3;
  double h_sample = 1e-2;
  /// Attack window [t0, t_f): the engine injects at samples t0 ≤ t < t_f.
  double t0 = 0.0;
  double t_f = 10.0;
  Vec x0;
  /// Admissible bound ξ_j per controlled output.
  Vec limits;
  /// Protective shutdown: end the run at the first sample with |z_j| ≥ ξ_j.
  bool stop_on_limit = false;

  void validate() const;
  std::size_t sample_count() const;
};

}  // namespace pdattack
