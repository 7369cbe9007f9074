#include "pdattack/ncs/closed_loop.hpp"

#include <cmath>

#include "pdattack/error.hpp"
#include "pdattack/ncs/noise.hpp"
#include "pdattack/numkit/ode.hpp"

namespace pdattack {

Mat SimTrace::gain(std::size_t k) const {
  const std::size_t p = state_dim;
  std::vector<double> v(adaptive_gain.begin() + static_cast<std::ptrdiff_t>(k * p * p),
                        adaptive_gain.begin() + static_cast<std::ptrdiff_t>((k + 1) * p * p));
  return Mat(p, p, std::move(v));
}

bool detector_test(const Vec& x_a, const DetectorConfig& det) { return x_a.norm() >= det.epsilon; }

namespace {

void append(std::vector<double>& dst, std::span<const double> src) { dst.insert(dst.end(), src.begin(), src.end()); }

}  // namespace

SimTrace run_closed_loop(const PlantModel& plant, const Mat& K, std::optional<AttackEngine> attack,
                         const SimConfig& sim, const NoiseConfig& noise, const DetectorConfig& det) {
  sim.validate();
  noise.validate();
  det.validate();
  const std::size_t p = plant.state_dim();
  const std::size_t m = plant.input_dim();
  const std::size_t q = plant.output_dim();
  if (K.rows() != m || K.cols() != p) throw Error(ErrorKind::DimensionMismatch, "controller gain must be m x p");
  if (sim.x0.dim() != p) throw Error(ErrorKind::DimensionMismatch, "x0 dimension differs from plant state");
  if (sim.limits.dim() != q) throw Error(ErrorKind::DimensionMismatch, "limits dimension differs from plant output");
  if (attack && attack->dim() != p) throw Error(ErrorKind::DimensionMismatch, "attack dimension differs from plant");

  const double h = sim.h_sample;
  const std::size_t substeps = static_cast<std::size_t>(std::ceil(h / sim.dt_int - 1e-9));
  const double dt = h / static_cast<double>(substeps);
  const std::size_t samples = sim.sample_count();
  const bool record_gain = attack && attack->has_adaptive_gain();
  const Mat& C = plant.output_matrix();

  SimTrace trace;
  trace.state_dim = p;
  trace.input_dim = m;
  trace.output_dim = q;
  trace.times.reserve(samples);
  trace.residual_norm.reserve(samples);

  GaussianStream gauss(noise.seed);
  Vec x = sim.x0;
  const Vec zero(p);

  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) * h;
    if (!x.all_finite()) {
      trace.diverged = true;
      trace.diverge_time = t;
      break;
    }

    Vec x_noisy = x;
    for (std::size_t i = 0; i < p; ++i) x_noisy[i] += noise.sigma_meas * gauss.next();

    const double slack = 1e-9 * h;
    const bool active = attack && t + slack >= sim.t0 && t + slack < sim.t_f;
    const Vec& a = active ? attack->output() : zero;
    const Vec x_a = x_noisy - a;
    const double res = x_a.norm();
    const Vec u = controller_output(K, x_a);
    const Vec z = C * x;

    trace.times.push_back(t);
    append(trace.x, x.data());
    append(trace.a, a.data());
    append(trace.x_a, x_a.data());
    append(trace.u, u.data());
    append(trace.z, z.data());
    trace.residual_norm.push_back(res);
    trace.alarm.push_back(res >= det.epsilon ? 1 : 0);
    if (record_gain) append(trace.adaptive_gain, attack->adaptive_gain().data());

    if (x.norm() > kStateSentinel) {
      trace.diverged = true;
      trace.diverge_time = t;
      break;
    }
    if (sim.stop_on_limit) {
      bool crossed = false;
      for (std::size_t j = 0; j < q; ++j) crossed = crossed || std::abs(z[j]) >= sim.limits[j];
      if (crossed) break;
    }
    if (k + 1 == samples) break;

    if (active) {
      attack->advance(x_a, h, sim.dt_int);
      if (attack->frozen()) {
        trace.diverged = true;
        trace.diverge_time = t + h;
        break;
      }
    }

    auto field = [&](double, const Vec& s) { return plant_derivative(plant, s, u); };
    try {
      for (std::size_t i = 0; i < substeps; ++i) x = rk4_step(field, t + static_cast<double>(i) * dt, x, dt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonFiniteState) throw;
      trace.diverged = true;
      trace.diverge_time = t + h;
      break;
    }
  }
  return trace;
}

}  // namespace pdattack
