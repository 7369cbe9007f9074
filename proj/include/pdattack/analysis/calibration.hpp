#pragma once

#include <cstdint>
#include <vector>

#include "pdattack/ncs/config.hpp"
#include "pdattack/ncs/plant.hpp"

namespace pdattack {

/// Attack-free setup that the detector threshold is calibrated against.
struct CalibrationScenario {
  PlantModel plant;
  Mat K;
  SimConfig sim;
};

struct CalibrationResult {
  std::vector<std::uint64_t> seeds;
  /// sup‖x_a‖ over t > settle, one per run.
  std::vector<double> sup_samples;
  double mean = 0.0;
  /// Population standard deviation.
  double std = 0.0;
  /// mean + 3·std.
  double epsilon = 0.0;
};

/// Runs n_runs attack-free simulations with seeds noise.seed + i.
/// Throws InvalidArgument for n_runs < 2.
CalibrationResult calibrate_threshold(const CalibrationScenario& scenario, std::size_t n_runs, const NoiseConfig& noise,
                                      double settle);

/// Fraction of attack-free runs (seeds noise.seed + i) with any alarm at
/// t > settle for threshold epsilon.
double false_alarm_rate(const CalibrationScenario& scenario, std::size_t n_runs, const NoiseConfig& noise, double settle,
                        double epsilon);

}  // namespace pdattack
