#include "pdattack/analysis/outcome.hpp"

#include <algorithm>
#include <cmath>

#include "pdattack/error.hpp"

namespace pdattack {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Ideal: return "Ideal";
    case Classification::QuasiIdeal: return "QuasiIdeal";
    case Classification::Detected: return "Detected";
    case Classification::Ineffective: return "Ineffective";
  }
  return "?";
}

std::string_view to_string(MapdaType t) {
  switch (t) {
    case MapdaType::Climbing: return "Climbing";
    case MapdaType::Peak: return "Peak";
    case MapdaType::Descending: return "Descending";
  }
  return "?";
}

Outcome evaluate_outcome(const SimTrace& trace, const DetectorConfig& det, const SimConfig& sim,
                         const OutcomeOptions& options) {
  if (trace.empty()) throw Error(ErrorKind::EmptyTrace, "trace has no samples");
  const std::size_t q = trace.output_dim;
  if (sim.limits.dim() != q) throw Error(ErrorKind::DimensionMismatch, "limits dimension differs from trace output");
  const double slack = 1e-9 * sim.h_sample;
  auto in_window = [&](double t) { return t + slack >= sim.t0 && t + slack < sim.t_f; };
  auto output_ratio = [&](std::size_t k) {
    const auto z = trace.output(k);
    double r = 0.0;
    for (std::size_t j = 0; j < q; ++j) r = std::max(r, std::abs(z[j]) / sim.limits[j]);
    return r;
  };

  Outcome out;
  std::optional<std::size_t> last_by_tf;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double t = trace.times[k];
    const double ratio = output_ratio(k);
    if (!out.limit_cross_time && ratio >= 1.0) out.limit_cross_time = t;
    if (t - slack <= sim.t_f) last_by_tf = k;
    if (!in_window(t)) continue;
    const double res = trace.residual_norm[k];
    out.sup_residual = std::max(out.sup_residual, res);
    out.peak_output_ratio = std::max(out.peak_output_ratio, ratio);
    if (!out.detection_time && res >= det.epsilon) out.detection_time = t;
  }

  out.stealthy_over_window = !out.detection_time;
  const bool diverged_in_window = trace.diverged && trace.diverge_time && *trace.diverge_time - slack <= sim.t_f;
  out.destructive = diverged_in_window || (last_by_tf && output_ratio(*last_by_tf) >= 1.0);

  if (out.detection_time) {
    out.classification = Classification::Detected;
  } else if (out.destructive) {
    out.classification = Classification::Ideal;
  } else if (out.peak_output_ratio >= options.quasi_ideal_fraction) {
    out.classification = Classification::QuasiIdeal;
  } else {
    out.classification = Classification::Ineffective;
  }

  if (!trace.adaptive_gain.empty()) {
    if (std::abs(out.sup_residual - det.epsilon) <= options.peak_band * det.epsilon) {
      out.mapda_type = MapdaType::Peak;
    } else {
      out.mapda_type = out.sup_residual > det.epsilon ? MapdaType::Climbing : MapdaType::Descending;
    }
  }
  return out;
}

}  // namespace pdattack
