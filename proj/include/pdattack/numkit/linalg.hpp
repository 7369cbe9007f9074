#pragma once

#include <complex>
#include <vector>

#include "pdattack/numkit/matrix.hpp"

namespace pdattack {

/// Solves M·X = rhs by LU with partial pivoting.
/// Throws SingularMatrix when a pivot falls below 1e-12·‖M‖_∞.
Mat lu_solve(const Mat& m, const Mat& rhs);
Vec lu_solve(const Mat& m, const Vec& rhs);
Mat inverse(const Mat& m);

struct Eigenvalue {
  std::complex<double> value;
  int multiplicity = 1;
};

/// Eigenvalues grouped into clusters of numerically coincident roots.
/// Ordered by descending real part, then descending imaginary part.
struct ComplexSpectrum {
  std::vector<Eigenvalue> eigenvalues;

  std::size_t dimension() const;
  /// Every eigenvalue repeated by multiplicity, in spectrum order.
  std::vector<std::complex<double>> expanded() const;
  /// max Re(λ).
  double spectral_abscissa() const;
};

/// Eigenvalues without clustering, as produced by the QR iteration
/// (balanced Hessenberg form, Francis double-shift steps).
std::vector<std::complex<double>> eigenvalues(const Mat& m);

/// Clustered spectrum; eigenvalues closer than 1e-6·max(1, ‖M‖_F) are
/// merged and counted as one root with multiplicity.
ComplexSpectrum eig(const Mat& m);

/// Unit eigenvector for an eigenvalue estimate, by complex inverse iteration.
std::vector<std::complex<double>> eigenvector(const Mat& m, std::complex<double> lambda);

/// e^{M t} by scaling and squaring around a degree-3..13 Padé core.
/// Throws Overflow if the result is not representable.
Mat mat_exp(const Mat& m, double t = 1.0);

/// Margin used to call a matrix strictly Hurwitz: every Re λ < -1e-9.
inline constexpr double kHurwitzMargin = 1e-9;

bool is_hurwitz(const Mat& m);

/// Solves Φᵀ·P + P·Φ = −Q through the Kronecker-vectorised system
/// (I⊗Φᵀ + Φᵀ⊗I)·vec(P) = −vec(Q). Output is exactly symmetric.
Mat solve_lyapunov(const Mat& phi, const Mat& q);

/// Eigenvalues of a symmetric matrix, ascending (cyclic Jacobi).
std::vector<double> symmetric_eigenvalues(const Mat& m);

/// True iff every eigenvalue exceeds 1e-12·‖M‖_F.
/// Throws Asymmetric if ‖M − Mᵀ‖_F > 1e-10·‖M‖_F.
bool is_positive_definite(const Mat& m);

/// Symmetry tolerance shared by the definiteness checks.
inline constexpr double kSymmetryTolerance = 1e-10;
void require_symmetric(const Mat& m, const char* what);

}  // namespace pdattack
