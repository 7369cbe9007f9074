#include "pdattack/analysis/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdattack/error.hpp"
#include "pdattack/ncs/closed_loop.hpp"

namespace pdattack {

namespace {

double sup_after(const CalibrationScenario& scenario, const NoiseConfig& noise, double settle) {
  DetectorConfig det;
  det.epsilon = std::numeric_limits<double>::max();
  const SimTrace trace = run_closed_loop(scenario.plant, scenario.K, std::nullopt, scenario.sim, noise, det);
  double sup = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k)
    if (trace.times[k] > settle) sup = std::max(sup, trace.residual_norm[k]);
  return sup;
}

NoiseConfig with_seed(const NoiseConfig& base, std::size_t i) {
  NoiseConfig n = base;
  n.seed = base.seed + i;
  return n;
}

}  // namespace

CalibrationResult calibrate_threshold(const CalibrationScenario& scenario, std::size_t n_runs, const NoiseConfig& noise,
                                      double settle) {
  if (n_runs < 2) throw Error(ErrorKind::InvalidArgument, "calibration needs at least 2 runs");
  if (!std::isfinite(settle) || settle < 0.0) throw Error(ErrorKind::InvalidArgument, "settle must be >= 0");
  CalibrationResult out;
  out.seeds.reserve(n_runs);
  out.sup_samples.reserve(n_runs);
  for (std::size_t i = 0; i < n_runs; ++i) {
    const NoiseConfig n = with_seed(noise, i);
    out.seeds.push_back(n.seed);
    out.sup_samples.push_back(sup_after(scenario, n, settle));
  }
  double sum = 0.0;
  for (double s : out.sup_samples) sum += s;
  out.mean = sum / static_cast<double>(n_runs);
  double var = 0.0;
  for (double s : out.sup_samples) var += (s - out.mean) * (s - out.mean);
  out.std = std::sqrt(var / static_cast<double>(n_runs));
  out.epsilon = out.mean + 3.0 * out.std;
  return out;
}

double false_alarm_rate(const CalibrationScenario& scenario, std::size_t n_runs, const NoiseConfig& noise, double settle,
                        double epsilon) {
  if (n_runs == 0) throw Error(ErrorKind::InvalidArgument, "false_alarm_rate needs at least 1 run");
  std::size_t alarms = 0;
  for (std::size_t i = 0; i < n_runs; ++i)
    if (sup_after(scenario, with_seed(noise, i), settle) >= epsilon) ++alarms;
  return static_cast<double>(alarms) / static_cast<double>(n_runs);
}

}  // namespace pdattack
