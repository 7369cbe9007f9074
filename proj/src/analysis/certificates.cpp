#include "pdattack/analysis/certificates.hpp"

#include "pdattack/error.hpp"
#include "pdattack/numkit/linalg.hpp"

namespace pdattack {

namespace {

void require_square(const Mat& m, std::size_t n, const char* what) {
  if (m.rows() != n || m.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be " + std::to_string(n) + "x" +
                                                  std::to_string(n));
}

void require_pd(const Mat& m, const char* what) {
  require_symmetric(m, what);
  if (!is_positive_definite(m)) throw Error(ErrorKind::NotPositiveDefinite, std::string(what) + " is not positive definite");
}

double lambda_max(const Mat& m) { return symmetric_eigenvalues(m).back(); }

}  // namespace

DefinitenessReport verify_lyapunov_certificate(const Mat& Phi_true, const Mat& P) {
  if (!Phi_true.square()) throw Error(ErrorKind::DimensionMismatch, "Phi must be square");
  require_square(P, Phi_true.rows(), "P");
  require_symmetric(P, "P");
  const Mat M = symmetrize(Phi_true.transpose() * P + P * Phi_true);
  const double lmax = lambda_max(M);
  return {lmax < -1e-12 * M.frobenius_norm(), lmax};
}

double lyapunov_value(const Vec& x_a, const Mat& P, const Mat& F_a, const Mat& A_n, const Mat& A, const Mat& Z) {
  const std::size_t p = x_a.dim();
  require_square(P, p, "P");
  require_square(F_a, p, "F_a");
  require_square(A_n, p, "A_n");
  require_square(A, p, "A");
  require_square(Z, p, "Z");
  const Mat Fd = F_a + A_n - A;
  return x_a.dot(P * x_a) + (Fd.transpose() * lu_solve(Z, Fd)).trace();
}

Mat assemble_omega(const Mat& A, const Mat& B, const Mat& K, const Mat& P1, const Mat& P2, const Mat& P3,
                   const Mat& P4, double h) {
  if (!A.square()) throw Error(ErrorKind::DimensionMismatch, "A must be square");
  const std::size_t p = A.rows();
  if (B.rows() != p || K.cols() != p || K.rows() != B.cols())
    throw Error(ErrorKind::DimensionMismatch, "B must be p x m and K m x p");
  require_square(P1, p, "P1");
  require_square(P2, p, "P2");
  require_square(P3, p, "P3");
  require_square(P4, p, "P4");
  require_pd(P1, "P1");
  require_pd(P2, "P2");
  require_pd(P3, "P3");
  require_pd(P4, "P4");

  const Mat BK = B * K;
  const Mat At = A.transpose();
  const double h2 = h * h;
  const Mat o11 = At * P1 + P1 * A + P2 + P3 + h2 * (At * P4 * A) - P4;
  const Mat o12 = P1 * BK + h2 * (At * P4 * BK);
  const Mat o22 = -P2 + h2 * (BK.transpose() * P4 * BK);
  const Mat o33 = -P3 - P4;

  Mat omega(3 * p, 3 * p);
  omega.set_block(0, 0, o11);
  omega.set_block(0, p, o12);
  omega.set_block(p, 0, o12.transpose());
  omega.set_block(0, 2 * p, P4);
  omega.set_block(2 * p, 0, P4.transpose());
  omega.set_block(p, p, o22);
  omega.set_block(2 * p, 2 * p, o33);
  return symmetrize(omega);
}

DefinitenessReport omega_is_negative_definite(const Mat& Omega) {
  if (!Omega.square()) throw Error(ErrorKind::DimensionMismatch, "Omega must be square");
  require_symmetric(Omega, "Omega");
  const double lmax = lambda_max(Omega);
  return {lmax < -1e-12 * Omega.frobenius_norm(), lmax};
}

}  // namespace pdattack
