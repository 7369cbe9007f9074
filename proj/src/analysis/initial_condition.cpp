#include "pdattack/analysis/initial_condition.hpp"

#include <algorithm>
#include <cmath>

#include "pdattack/error.hpp"
#include "pdattack/numkit/linalg.hpp"

namespace pdattack {

namespace {

// Basis of the null space of a real square matrix by Gauss-Jordan
// elimination with full pivoting.
std::vector<Vec> null_space(Mat m, double tol) {
  const std::size_t n = m.rows();
  std::vector<std::size_t> col_perm(n);
  for (std::size_t j = 0; j < n; ++j) col_perm[j] = j;
  std::size_t rank = 0;
  for (; rank < n; ++rank) {
    std::size_t pr = rank, pc = rank;
    double best = 0.0;
    for (std::size_t i = rank; i < n; ++i)
      for (std::size_t j = rank; j < n; ++j)
        if (std::abs(m(i, j)) > best) {
          best = std::abs(m(i, j));
          pr = i;
          pc = j;
        }
    if (best <= tol) break;
    for (std::size_t j = 0; j < n; ++j) std::swap(m(rank, j), m(pr, j));
    for (std::size_t i = 0; i < n; ++i) std::swap(m(i, rank), m(i, pc));
    std::swap(col_perm[rank], col_perm[pc]);
    const double piv = m(rank, rank);
    for (std::size_t j = 0; j < n; ++j) m(rank, j) /= piv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == rank || m(i, rank) == 0.0) continue;
      const double f = m(i, rank);
      for (std::size_t j = 0; j < n; ++j) m(i, j) -= f * m(rank, j);
    }
  }
  std::vector<Vec> basis;
  for (std::size_t free = rank; free < n; ++free) {
    Vec v(n);
    v[col_perm[free]] = 1.0;
    for (std::size_t i = 0; i < rank; ++i) v[col_perm[i]] = -m(i, free);
    basis.push_back(v * (1.0 / v.norm()));
  }
  return basis;
}

// Rotates a complex vector so its largest entry is real and positive.
std::vector<std::complex<double>> normalise_phase(std::vector<std::complex<double>> v) {
  std::size_t big = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[big])) big = i;
  const std::complex<double> rot = std::conj(v[big]) / std::abs(v[big]);
  for (auto& c : v) c *= rot;
  return v;
}

HalfPlane classify(double re, double scale) {
  const double tol = 1e-9 * std::max(1.0, scale);
  if (re > tol) return HalfPlane::OpenRight;
  if (re < -tol) return HalfPlane::OpenLeft;
  return HalfPlane::ImaginaryAxis;
}

struct Unit {
  std::size_t start;
  std::size_t size;  // 1 (real) or 2 (complex pair in real form)
  std::complex<double> value;
};

std::vector<JordanChainReport> parse_chains(const Mat& J, double scale) {
  const std::size_t n = J.rows();
  const double tol = 1e-9 * std::max(1.0, J.frobenius_norm());
  std::vector<Unit> units;
  for (std::size_t i = 0; i < n;) {
    if (i + 1 < n && std::abs(J(i + 1, i)) > tol) {
      units.push_back({i, 2, {J(i, i), std::abs(J(i, i + 1))}});
      i += 2;
    } else {
      units.push_back({i, 1, {J(i, i), 0.0}});
      i += 1;
    }
  }
  std::vector<JordanChainReport> chains;
  for (std::size_t u = 0; u < units.size(); ++u) {
    const Unit& cur = units[u];
    const bool continues = !chains.empty() && u > 0 && [&] {
      const Unit& prev = units[u - 1];
      if (prev.size != cur.size) return false;
      return std::abs(J(prev.start, cur.start)) > tol;
    }();
    if (continues) {
      auto& c = chains.back();
      ++c.multiplicity;
      c.defective = true;
    } else {
      JordanChainReport c;
      c.eigenvalue = cur.value;
      c.half_plane = classify(cur.value.real(), scale);
      chains.push_back(c);
    }
    for (std::size_t k = 0; k < cur.size; ++k) chains.back().indices.push_back(cur.start + k);
  }
  return chains;
}

}  // namespace

std::pair<Mat, Mat> real_diagonal_decomposition(const Mat& M) {
  if (!M.square()) throw Error(ErrorKind::DimensionMismatch, "matrix must be square");
  const std::size_t n = M.rows();
  const ComplexSpectrum spec = eig(M);
  const double scale = std::max(1.0, M.frobenius_norm());
  Mat X(n, n), J(n, n);
  std::size_t col = 0;
  for (const Eigenvalue& e : spec.eigenvalues) {
    const double re = e.value.real();
    const double im = e.value.imag();
    if (im < 0.0) continue;  // handled with its conjugate
    if (im == 0.0) {
      if (e.multiplicity == 1) {
        const auto v = normalise_phase(eigenvector(M, e.value));
        for (std::size_t i = 0; i < n; ++i) X(i, col) = v[i].real();
        J(col, col) = re;
        ++col;
        continue;
      }
      const auto basis = null_space(M - Mat::identity(n) * re, 1e-7 * scale);
      if (basis.size() < static_cast<std::size_t>(e.multiplicity))
        throw Error(ErrorKind::DecompositionFailed,
                    "matrix is defective; supply X and J for its Jordan decomposition");
      for (int k = 0; k < e.multiplicity; ++k) {
        for (std::size_t i = 0; i < n; ++i) X(i, col) = basis[static_cast<std::size_t>(k)][i];
        J(col, col) = re;
        ++col;
      }
      continue;
    }
    if (e.multiplicity > 1)
      throw Error(ErrorKind::DecompositionFailed, "repeated complex eigenvalues need a supplied X and J");
    const auto v = normalise_phase(eigenvector(M, e.value));
    for (std::size_t i = 0; i < n; ++i) {
      X(i, col) = v[i].real();
      X(i, col + 1) = v[i].imag();
    }
    J(col, col) = re;
    J(col, col + 1) = im;
    J(col + 1, col) = -im;
    J(col + 1, col + 1) = re;
    col += 2;
  }
  if (col != n) throw Error(ErrorKind::DecompositionFailed, "eigenvalue count does not match dimension");
  try {
    const Mat recon = X * J * inverse(X);
    if ((recon - M).frobenius_norm() > kReconstructionTolerance * scale)
      throw Error(ErrorKind::DecompositionFailed, "eigenvector basis does not reproduce the matrix");
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::SingularMatrix) throw;
    throw Error(ErrorKind::DecompositionFailed, "matrix is defective; supply X and J for its Jordan decomposition");
  }
  return {X, J};
}

IcCheckResult check_initial_condition(const Mat& M, const Vec& x0, const std::optional<Mat>& X,
                                      const std::optional<Mat>& J, double reconstruction_tolerance) {
  if (!M.square()) throw Error(ErrorKind::DimensionMismatch, "matrix must be square");
  const std::size_t n = M.rows();
  if (x0.dim() != n) throw Error(ErrorKind::DimensionMismatch, "x0 dimension differs from matrix");
  if (!(reconstruction_tolerance > 0.0)) throw Error(ErrorKind::InvalidArgument, "reconstruction tolerance must be > 0");
  if (X.has_value() != J.has_value()) throw Error(ErrorKind::InvalidArgument, "X and J must be given together");

  IcCheckResult out;
  if (X) {
    if (X->rows() != n || X->cols() != n || J->rows() != n || J->cols() != n)
      throw Error(ErrorKind::DimensionMismatch, "X and J must match the matrix dimension");
    const Mat recon = *X * *J * inverse(*X);
    const double scale = std::max(M.frobenius_norm(), 1e-300);
    if ((recon - M).frobenius_norm() > reconstruction_tolerance * scale)
      throw Error(ErrorKind::InvalidArgument, "X J X^-1 does not reproduce the matrix");
    out.X = *X;
    out.J = *J;
  } else {
    std::tie(out.X, out.J) = real_diagonal_decomposition(M);
  }

  out.psi0 = lu_solve(out.X, x0);
  out.eigen_report = parse_chains(out.J, M.frobenius_norm());

  for (const auto& chain : out.eigen_report) {
    std::size_t first_checked = chain.indices.size();
    if (chain.half_plane == HalfPlane::OpenRight) {
      first_checked = 0;
    } else if (chain.multiplicity > 1) {
      first_checked = chain.indices.size() / static_cast<std::size_t>(chain.multiplicity);
    }
    for (std::size_t k = first_checked; k < chain.indices.size(); ++k) {
      const std::size_t idx = chain.indices[k];
      if (std::abs(out.psi0[idx]) > kPsiZeroTolerance) out.violating_indices.push_back(idx);
    }
  }
  std::sort(out.violating_indices.begin(), out.violating_indices.end());
  out.satisfies_condition = out.violating_indices.empty();
  return out;
}

}  // namespace pdattack
