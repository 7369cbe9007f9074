#pragma once

#include <optional>
#include <string_view>

#include "pdattack/ncs/closed_loop.hpp"
#include "pdattack/ncs/config.hpp"

namespace pdattack {

enum class Classification { Ideal, QuasiIdeal, Detected, Ineffective };

/// Position of the detector threshold relative to sup‖x_a‖ under an
/// adaptive attack: climbing when the residual sup exceeds ε, descending
/// when it stays below, peak when the two coincide within 1% of ε.
enum class MapdaType { Climbing, Peak, Descending };

std::string_view to_string(Classification c);
std::string_view to_string(MapdaType t);

struct Outcome {
  bool stealthy_over_window = true;
  std::optional<double> detection_time;
  std::optional<double> limit_cross_time;
  bool destructive = false;
  Classification classification = Classification::Ineffective;
  /// Set only for traces recorded with an adaptive gain.
  std::optional<MapdaType> mapda_type;
  double sup_residual = 0.0;
  /// max_j |z_j|/ξ_j over the window.
  double peak_output_ratio = 0.0;
};

struct OutcomeOptions {
  double quasi_ideal_fraction = 0.8;
  double peak_band = 0.01;
};

/// Scores a trace over the samples where the attack injects, t0 ≤ t < t_f.
/// The destructiveness test is taken at the last sample at or before t_f,
/// which is the stopping sample for runs that ended early; a run flagged as
/// diverged by t_f is destructive. Throws EmptyTrace.
Outcome evaluate_outcome(const SimTrace& trace, const DetectorConfig& det, const SimConfig& sim,
                         const OutcomeOptions& options = {});

}  // namespace pdattack
