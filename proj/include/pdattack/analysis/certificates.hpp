#pragma once

#include "pdattack/numkit/matrix.hpp"

namespace pdattack {

struct DefinitenessReport {
  bool negative_definite = false;
  double lambda_max = 0.0;
};

/// Checks whether Φ_trueᵀ·P + P·Φ_true ≺ 0, i.e. whether a P solved on one
/// closed loop still certifies another. Throws Asymmetric for non-symmetric P.
DefinitenessReport verify_lyapunov_certificate(const Mat& Phi_true, const Mat& P);

/// V = x_aᵀ·P·x_a + tr(F_aᵈᵀ·Z⁻¹·F_aᵈ) with F_aᵈ = F_a + A_n − A.
double lyapunov_value(const Vec& x_a, const Mat& P, const Mat& F_a, const Mat& A_n, const Mat& A, const Mat& Z);

/// Delay-induced stability block matrix (3p×3p, symmetric):
///   Ω11 = AᵀP1 + P1A + P2 + P3 + h²AᵀP4A − P4
///   Ω12 = P1BK + h²AᵀP4BK,  Ω13 = P4
///   Ω22 = −P2 + h²KᵀBᵀP4BK, Ω23 = 0,  Ω33 = −P3 − P4
/// Throws NotPositiveDefinite (or Asymmetric) if some Pi is not ≻ 0.
Mat assemble_omega(const Mat& A, const Mat& B, const Mat& K, const Mat& P1, const Mat& P2, const Mat& P3,
                   const Mat& P4, double h);

/// Negative definite iff λ_max(Ω) < −1e-12·‖Ω‖_F. Throws Asymmetric.
DefinitenessReport omega_is_negative_definite(const Mat& Omega);

}  // namespace pdattack
