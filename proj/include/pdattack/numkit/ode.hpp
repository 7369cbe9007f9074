#pragma once

#include "pdattack/error.hpp"
#include "pdattack/numkit/matrix.hpp"

namespace pdattack {

/// One classical fourth-order Runge–Kutta step of ẏ = f(t, y).
/// Throws NonFiniteState if the result contains NaN or Inf.
template <class VectorField>
Vec rk4_step(VectorField&& f, double t, const Vec& y, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "rk4_step: dt must be positive");
  const double half = 0.5 * dt;
  const Vec k1 = f(t, y);
  const Vec k2 = f(t + half, y + half * k1);
  const Vec k3 = f(t + half, y + half * k2);
  const Vec k4 = f(t + dt, y + dt * k3);
  Vec out = y;
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < out.dim(); ++i) out[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  if (!out.all_finite()) throw Error(ErrorKind::NonFiniteState, "rk4_step produced a non-finite state");
  return out;
}

}  // namespace pdattack
