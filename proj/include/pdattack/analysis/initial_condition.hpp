#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "pdattack/numkit/matrix.hpp"

namespace pdattack {

enum class HalfPlane { OpenRight, ImaginaryAxis, OpenLeft };

/// One Jordan chain of the decomposition M = X·J·X⁻¹.
struct JordanChainReport {
  std::complex<double> eigenvalue;
  /// Chain length (number of Jordan units sharing the eigenvalue).
  int multiplicity = 1;
  HalfPlane half_plane = HalfPlane::OpenLeft;
  bool defective = false;
  /// Positions in ψ covered by the chain (two per unit for complex pairs).
  std::vector<std::size_t> indices;
};

struct IcCheckResult {
  std::vector<JordanChainReport> eigen_report;
  /// ψ0 = X⁻¹·x0.
  Vec psi0;
  bool satisfies_condition = false;
  std::vector<std::size_t> violating_indices;
  Mat X;
  Mat J;
};

/// |ψ_i| at or below this counts as zero.
inline constexpr double kPsiZeroTolerance = 1e-12;

/// Default bound on ‖M − X·J·X⁻¹‖_F / ‖M‖_F for a supplied decomposition.
inline constexpr double kReconstructionTolerance = 1e-6;

/// Decides whether an auxiliary model ẋ = M·x started at x0 converges to 0
/// despite unstable modes. With ψ0 = X⁻¹x0 in Jordan coordinates:
///   (i)  every ψ component of a chain with Re λ > 0 must vanish;
///   (ii) for a repeated root with Re λ ≤ 0, all but the leading component
///        of its chain must vanish.
/// X and J may be supplied (required for defective M); otherwise M must be
/// diagonalisable and the decomposition is computed, with complex pairs in
/// real 2×2 form. Throws DecompositionFailed for defective M without X, J,
/// and InvalidArgument when a supplied pair misses M by more than
/// reconstruction_tolerance (relative, Frobenius). Decompositions
/// rounded to a few digits need a looser bound than the default.
IcCheckResult check_initial_condition(const Mat& M, const Vec& x0, const std::optional<Mat>& X = std::nullopt,
                                      const std::optional<Mat>& J = std::nullopt,
                                      double reconstruction_tolerance = kReconstructionTolerance);

/// Computes a real (block-)diagonal decomposition M = X·J·X⁻¹ for a
/// diagonalisable M. Throws DecompositionFailed otherwise.
std::pair<Mat, Mat> real_diagonal_decomposition(const Mat& M);

}  // namespace pdattack
