#include "pdattack/ncs/config.hpp"

#include <cmath>
#include <string>

#include "pdattack/error.hpp"

namespace pdattack {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

}  // namespace

void DetectorConfig::validate() const {
  require(std::isfinite(epsilon) && epsilon > 0.0, "detector.epsilon must be > 0");
  require(std::isfinite(settle_time) && settle_time >= 0.0, "detector.settle_time must be >= 0");
}

void NoiseConfig::validate() const {
  require(std::isfinite(sigma_meas) && sigma_meas >= 0.0, "noise.sigma_meas must be >= 0");
}

void SimConfig::validate() const {
  require(std::isfinite(dt_int) && dt_int > 0.0, "sim.dt_int must be > 0");
  require(std::isfinite(h_sample) && dt_int <= h_sample * (1.0 + 1e-12), "sim.dt_int must not exceed sim.h_sample");
  require(std::isfinite(t0) && std::isfinite(t_f) && std::isfinite(t_end), "sim times must be finite");
  require(t0 >= 0.0 && t0 <= t_f && t_f <= t_end, "sim requires 0 <= t0 <= t_f <= t_end");
  require(x0.dim() > 0, "sim.x0 must be set");
  require(limits.dim() > 0, "sim.limits must be set");
  for (double l : limits.data()) require(l > 0.0, "sim.limits must be strictly positive");
}

std::size_t SimConfig::sample_count() const {
  return static_cast<std::size_t>(std::floor(t_end / h_sample + 1e-9)) + 1;
}

}  // namespace pdattack
