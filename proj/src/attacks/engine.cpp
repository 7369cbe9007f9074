#include "pdattack/attacks/engine.hpp"

#include <cmath>
#include <string>

#include "pdattack/error.hpp"
#include "pdattack/numkit/linalg.hpp"
#include "pdattack/numkit/ode.hpp"

namespace pdattack {

std::string_view to_string(AttackVariant v) {
  switch (v) {
    case AttackVariant::TpdaExact: return "tpda_exact";
    case AttackVariant::TpdaNominal: return "tpda_nominal";
    case AttackVariant::MapdaIdeal: return "mapda_ideal";
    case AttackVariant::MapdaRegulated: return "mapda_regulated";
    case AttackVariant::DiscreteTpdaExact: return "discrete_tpda_exact";
    case AttackVariant::DiscreteTpdaNominal: return "discrete_tpda_nominal";
    case AttackVariant::DiscreteMapda: return "discrete_mapda";
    case AttackVariant::DelayInducedDiscreteMapda: return "delay_induced_discrete_mapda";
  }
  return "unknown";
}

bool is_mapda(AttackVariant v) {
  return v == AttackVariant::MapdaIdeal || v == AttackVariant::MapdaRegulated || v == AttackVariant::DiscreteMapda ||
         v == AttackVariant::DelayInducedDiscreteMapda;
}

bool is_discrete(AttackVariant v) {
  return v == AttackVariant::DiscreteTpdaExact || v == AttackVariant::DiscreteTpdaNominal ||
         v == AttackVariant::DiscreteMapda || v == AttackVariant::DelayInducedDiscreteMapda;
}

namespace {

void require_square_dim(const Mat& m, std::size_t p, const char* name) {
  if (m.rows() != p || m.cols() != p) {
    throw Error(ErrorKind::DimensionMismatch, std::string(name) + " must be " + std::to_string(p) + "x" +
                                                  std::to_string(p));
  }
}

void require_pd(const Mat& m, const char* name) {
  bool pd = false;
  try {
    pd = is_positive_definite(m);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Asymmetric) throw;
  }
  if (!pd) throw Error(ErrorKind::NotPositiveDefinite, std::string(name) + " must be symmetric positive definite");
}

// Solves the Lyapunov equation and checks the invariants the adaptive law
// relies on.
MapdaParams build_params(const Mat& phi, const Mat& Q, const Mat& Z, const Mat& F_a0, const Vec& aux0) {
  const std::size_t p = phi.rows();
  require_square_dim(Q, p, "Q");
  require_square_dim(Z, p, "Z");
  require_square_dim(F_a0, p, "F_a0");
  if (aux0.dim() != p) throw Error(ErrorKind::DimensionMismatch, "aux0 dimension");
  require_pd(Q, "Q");
  require_pd(Z, "Z");
  Mat P = solve_lyapunov(phi, Q);
  const double residual = (phi.transpose() * P + P * phi + Q).frobenius_norm();
  if (residual > 1e-8 * Q.frobenius_norm()) {
    throw Error(ErrorKind::NotHurwitz, "Lyapunov residual " + std::to_string(residual) + " above tolerance");
  }
  if (!is_positive_definite(P)) throw Error(ErrorKind::NotPositiveDefinite, "Lyapunov solution P");
  return MapdaParams{Q, Z, std::move(P), F_a0, aux0};
}

std::size_t substeps(double h, double dt_int) {
  if (dt_int <= 0.0 || dt_int >= h) return 1;
  return static_cast<std::size_t>(std::ceil(h / dt_int - 1e-9));
}

}  // namespace

AttackEngine::AttackEngine(AttackVariant v, Mat model, Vec aux0)
    : variant_(v), model_(std::move(model)), aux_(std::move(aux0)) {
  if (!model_.square() || model_.rows() == 0) throw Error(ErrorKind::DimensionMismatch, "attack model must be square");
  if (aux_.dim() != model_.rows()) throw Error(ErrorKind::DimensionMismatch, "auxiliary state dimension");
}

const Mat& AttackEngine::adaptive_gain() const {
  if (!has_adaptive_gain()) throw Error(ErrorKind::InvalidArgument, "TPDA engines have no adaptive gain");
  return gain_;
}

const MapdaParams& AttackEngine::mapda_params() const {
  if (!mapda_) throw Error(ErrorKind::InvalidArgument, "TPDA engines have no MAPDA parameters");
  return *mapda_;
}

const Mat& AttackEngine::cached_exp(double h) {
  auto it = exp_cache_.find(h);
  if (it == exp_cache_.end()) it = exp_cache_.emplace(h, mat_exp(model_, h)).first;
  return it->second;
}

void AttackEngine::advance(const Vec& x_a, double h, double dt_int) {
  if (frozen_) return;
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "advance: h must be positive");
  if (x_a.dim() != aux_.dim()) throw Error(ErrorKind::DimensionMismatch, "advance: x_a dimension");
  if (period_ && std::abs(h - *period_) > 1e-12 * *period_) {
    throw Error(ErrorKind::InvalidArgument, "discrete engine built for h=" + std::to_string(*period_) +
                                                " advanced with h=" + std::to_string(h));
  }

  const Vec saved_aux = aux_;
  const Mat saved_gain = gain_;
  try {
    switch (variant_) {
      case AttackVariant::TpdaExact:
      case AttackVariant::TpdaNominal: advance_tpda_continuous(h, dt_int); break;
      case AttackVariant::DiscreteTpdaExact:
      case AttackVariant::DiscreteTpdaNominal: advance_tpda_discrete(h); break;
      case AttackVariant::MapdaIdeal:
      case AttackVariant::MapdaRegulated: advance_mapda_continuous(x_a, h, dt_int); break;
      case AttackVariant::DiscreteMapda:
      case AttackVariant::DelayInducedDiscreteMapda: advance_mapda_discrete(x_a, h); break;
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonFiniteState && e.kind() != ErrorKind::Overflow) throw;
    aux_ = saved_aux;
    gain_ = saved_gain;
    frozen_ = true;
    return;
  }
  if (!aux_.all_finite() || aux_.norm() > kDivergenceSentinel || !gain_.all_finite()) {
    aux_ = saved_aux;
    gain_ = saved_gain;
    frozen_ = true;
  }
}

void AttackEngine::advance_tpda_continuous(double h, double dt_int) {
  const std::size_t n = substeps(h, dt_int);
  const double dt = h / static_cast<double>(n);
  auto field = [this](double, const Vec& y) { return model_ * y; };
  for (std::size_t i = 0; i < n; ++i) aux_ = rk4_step(field, 0.0, aux_, dt);
}

void AttackEngine::advance_tpda_discrete(double h) { aux_ = cached_exp(h) * aux_; }

void AttackEngine::advance_mapda_continuous(const Vec& x_a, double h, double dt_int) {
  const std::size_t p = aux_.dim();
  // x_a is held over the period, so Z·P·x_a is constant.
  const Vec w = zp_ * x_a;
  auto field = [&](double, const Vec& s) {
    Vec ds(s.dim());
    for (std::size_t i = 0; i < p; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < p; ++j) acc += (model_(i, j) + s[p + i * p + j]) * s[j];
      ds[i] = acc;
    }
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) ds[p + i * p + j] = w[i] * s[j];
    return ds;
  };
  Vec state(p + p * p);
  for (std::size_t i = 0; i < p; ++i) state[i] = aux_[i];
  for (std::size_t k = 0; k < p * p; ++k) state[p + k] = gain_.data()[k];

  const std::size_t n = substeps(h, dt_int);
  const double dt = h / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) state = rk4_step(field, 0.0, state, dt);

  for (std::size_t i = 0; i < p; ++i) aux_[i] = state[i];
  for (std::size_t k = 0; k < p * p; ++k) gain_.data()[k] = state[p + k];
}

void AttackEngine::advance_mapda_discrete(const Vec& x_a, double h) {
  const Vec aux_old = aux_;
  Mat increment = h * Mat::outer(zp_ * x_a, aux_old);
  if (delay_) {
    const auto& d = *delay_;
    const Vec& prev = previous_x_a_ ? *previous_x_a_ : x_a;
    const Mat f_d = gain_ + model_ - d.A;
    const Mat z1p4 = d.Z1 * d.P4;
    Vec drive = d.A * x_a;
    drive += d.BK * prev;
    drive -= 0.5 * (f_d * aux_old);
    increment += (h * h) * Mat::outer(z1p4 * drive, aux_old);
    previous_x_a_ = x_a;
  }
  aux_ = mat_exp(model_ + gain_, h) * aux_old;
  gain_ += increment;
}

AttackEngine make_tpda_exact(const Mat& A, const Vec& x_eam0, TimeModel time) {
  return AttackEngine(time == TimeModel::Continuous ? AttackVariant::TpdaExact : AttackVariant::DiscreteTpdaExact, A,
                      x_eam0);
}

AttackEngine make_tpda_nominal(const Mat& A_n, const Vec& x_nam0, TimeModel time) {
  return AttackEngine(time == TimeModel::Continuous ? AttackVariant::TpdaNominal : AttackVariant::DiscreteTpdaNominal,
                      A_n, x_nam0);
}

AttackEngine make_mapda(const Mat& A_n, const Mat& phi_for_lyap, const Mat& Q, const Mat& Z, const Mat& F_a0,
                        const Vec& aux0, LyapunovModel kind) {
  AttackEngine e(kind == LyapunovModel::Ideal ? AttackVariant::MapdaIdeal : AttackVariant::MapdaRegulated, A_n, aux0);
  require_square_dim(phi_for_lyap, A_n.rows(), "Phi");
  e.mapda_ = build_params(phi_for_lyap, Q, Z, F_a0, aux0);
  e.gain_ = F_a0;
  e.zp_ = Z * e.mapda_->P;
  return e;
}

AttackEngine make_discrete_mapda(const Mat& A_n, const Mat& Phi_n, const Mat& Q, const Mat& Z, const Mat& F_a0,
                                 const Vec& aux0, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "sampling period h must be positive");
  AttackEngine e(AttackVariant::DiscreteMapda, A_n, aux0);
  require_square_dim(Phi_n, A_n.rows(), "Phi_n");
  e.mapda_ = build_params(Phi_n, Q, Z, F_a0, aux0);
  e.gain_ = F_a0;
  e.zp_ = Z * e.mapda_->P;
  e.period_ = h;
  return e;
}

AttackEngine make_delay_induced_discrete_mapda(const Mat& A, const Mat& A_n, const Mat& B, const Mat& K,
                                               const Mat& Phi_n, const Mat& Q, const Mat& Z1, const Mat& P1,
                                               const Mat& P4, const Mat& F_a0, const Vec& aux0, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "sampling period h must be positive");
  AttackEngine e(AttackVariant::DelayInducedDiscreteMapda, A_n, aux0);
  const std::size_t p = A_n.rows();
  require_square_dim(A, p, "A");
  require_square_dim(Phi_n, p, "Phi_n");
  require_square_dim(P1, p, "P1");
  require_square_dim(P4, p, "P4");
  if (B.rows() != p || K.cols() != p || K.rows() != B.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "B must be p x m and K m x p");
  }
  require_pd(P1, "P1");
  require_pd(P4, "P4");
  e.mapda_ = build_params(Phi_n, Q, Z1, F_a0, aux0);
  e.gain_ = F_a0;
  e.zp_ = Z1 * P1;
  e.delay_ = DelayInducedTerms{A, B * K, Z1, P1, P4};
  e.period_ = h;
  return e;
}

Vec attack_emit(AttackEngine& engine, double /*t*/, const Vec& x_a_sample, double h, double dt_int) {
  if (engine.frozen()) throw Error(ErrorKind::NonFiniteState, "attack engine diverged beyond 1e9");
  Vec a = engine.output();
  engine.advance(x_a_sample, h, dt_int);
  return a;
}

}  // namespace pdattack
