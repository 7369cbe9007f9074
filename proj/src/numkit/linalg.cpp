#include "pdattack/numkit/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pdattack/error.hpp"

namespace pdattack {

namespace {

void require_square(const Mat& m, const char* what) {
  if (!m.square() || m.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " needs a non-empty square matrix");
  }
}

}  // namespace

// ---- LU -------------------------------------------------------------------

Mat lu_solve(const Mat& m, const Mat& rhs) {
  require_square(m, "lu_solve");
  if (rhs.rows() != m.rows()) throw Error(ErrorKind::DimensionMismatch, "lu_solve: rhs rows differ from matrix");
  const std::size_t n = m.rows();
  const double tiny = 1e-12 * m.inf_norm();
  Mat a = m;
  Mat x = rhs;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= tiny || a(piv, k) == 0.0) {
      throw Error(ErrorKind::SingularMatrix, "pivot " + std::to_string(k) + " below 1e-12*||M||_inf");
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x(ii, c);
      for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x(j, c);
      x(ii, c) = s / a(ii, ii);
    }
  }
  return x;
}

Vec lu_solve(const Mat& m, const Vec& rhs) {
  const Mat x = lu_solve(m, Mat::column(rhs));
  Vec out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = x(i, 0);
  return out;
}

Mat inverse(const Mat& m) {
  require_square(m, "inverse");
  return lu_solve(m, Mat::identity(m.rows()));
}

// ---- unsymmetric eigenvalues ----------------------------------------------

namespace {

constexpr std::size_t kMaxEigenDimension = 16;
constexpr int kMaxQrIterations = 60;

void balance(Mat& a) {
  const double radix = std::numeric_limits<double>::radix;
  const double sqrdx = radix * radix;
  const std::size_t n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Gaussian elimination with pivoting to upper Hessenberg form.
void reduce_to_hessenberg(Mat& a) {
  const std::size_t n = a.rows();
  for (std::size_t m = 1; m + 1 < n; ++m) {
    double x = 0.0;
    std::size_t i = m;
    for (std::size_t j = m; j < n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        i = j;
      }
    }
    if (i != m) {
      for (std::size_t j = m - 1; j < n; ++j) std::swap(a(i, j), a(m, j));
      for (std::size_t j = 0; j < n; ++j) std::swap(a(j, i), a(j, m));
    }
    if (x == 0.0) continue;
    for (i = m + 1; i < n; ++i) {
      double y = a(i, m - 1);
      if (y == 0.0) continue;
      y /= x;
      a(i, m - 1) = 0.0;
      for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
      for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
    }
  }
}

double sign_of(double magnitude, double s) { return s >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude); }

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr lineage).
std::vector<std::complex<double>> hessenberg_qr(Mat& a) {
  const int n = static_cast<int>(a.rows());
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<std::complex<double>> w(n);
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  int nn = n - 1;
  double t = 0.0;
  double p = 0, q = 0, r = 0, s = 0, x = 0, y = 0, z = 0, u = 0, v = 0, ww = 0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        w[nn--] = x + t;
      } else {
        y = a(nn - 1, nn - 1);
        ww = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + ww;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            w[nn - 1] = w[nn] = x + z;
            if (z != 0.0) w[nn] = x - ww / z;
          } else {
            w[nn] = {x + p, -z};
            w[nn - 1] = std::conj(w[nn]);
          }
          nn -= 2;
        } else {
          if (its == kMaxQrIterations) {
            throw Error(ErrorKind::ConvergenceFailure, "QR iteration did not converge");
          }
          if (its == 10 || its == 20 || its == 40) {
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k + 1 != nn) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k + 1 != nn) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

bool spectrum_order(const std::complex<double>& a, const std::complex<double>& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Mat& m) {
  require_square(m, "eig");
  if (m.rows() > kMaxEigenDimension) {
    throw Error(ErrorKind::DimensionMismatch, "eig supports dimension <= 16");
  }
  if (!m.all_finite()) throw Error(ErrorKind::NonFinite, "eig input has non-finite entries");
  Mat a = m;
  balance(a);
  reduce_to_hessenberg(a);
  auto w = hessenberg_qr(a);
  std::sort(w.begin(), w.end(), spectrum_order);
  return w;
}

std::size_t ComplexSpectrum::dimension() const {
  std::size_t n = 0;
  for (const auto& e : eigenvalues) n += static_cast<std::size_t>(e.multiplicity);
  return n;
}

std::vector<std::complex<double>> ComplexSpectrum::expanded() const {
  std::vector<std::complex<double>> out;
  for (const auto& e : eigenvalues) out.insert(out.end(), static_cast<std::size_t>(e.multiplicity), e.value);
  return out;
}

double ComplexSpectrum::spectral_abscissa() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& e : eigenvalues) best = std::max(best, e.value.real());
  return best;
}

ComplexSpectrum eig(const Mat& m) {
  const auto raw = eigenvalues(m);
  const double tol = 1e-6 * std::max(1.0, m.frobenius_norm());

  // Single-linkage clustering; a defective root of order k is perturbed by
  // roughly eps^(1/k)·‖M‖, which stays well inside tol for k ≤ 2.
  const std::size_t n = raw.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(raw[i] - raw[j]) <= tol) parent[find(i)] = find(j);

  ComplexSpectrum spectrum;
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    auto it = std::find(roots.begin(), roots.end(), r);
    if (it == roots.end()) {
      roots.push_back(r);
      spectrum.eigenvalues.push_back({raw[i], 1});
    } else {
      auto& e = spectrum.eigenvalues[static_cast<std::size_t>(it - roots.begin())];
      e.value += raw[i];
      ++e.multiplicity;
    }
  }
  for (auto& e : spectrum.eigenvalues) {
    e.value /= static_cast<double>(e.multiplicity);
    if (std::abs(e.value.imag()) <= tol) e.value = {e.value.real(), 0.0};
  }
  std::sort(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end(),
            [](const Eigenvalue& a, const Eigenvalue& b) { return spectrum_order(a.value, b.value); });
  return spectrum;
}

std::vector<std::complex<double>> eigenvector(const Mat& m, std::complex<double> lambda) {
  require_square(m, "eigenvector");
  using cd = std::complex<double>;
  const std::size_t n = m.rows();
  const double scale = std::max(1.0, m.frobenius_norm());
  const cd shift = lambda + cd(1e-10 * scale, 1e-10 * scale);

  std::vector<cd> v(n, cd(1.0, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i] += cd(0.01 * static_cast<double>(i + 1), 0.0);

  // LU of (M − shift·I) in complex arithmetic.
  std::vector<cd> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = cd(m(i, j), 0.0) - (i == j ? shift : cd(0.0));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(perm[k], perm[piv]);
    }
    if (std::abs(a[k * n + k]) < 1e-300) a[k * n + k] = cd(1e-300 * scale, 0.0);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cd f = a[i * n + k] / a[k * n + k];
      a[i * n + k] = f;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  for (int iter = 0; iter < 4; ++iter) {
    std::vector<cd> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      cd s = v[perm[i]];
      for (std::size_t j = 0; j < i; ++j) s -= a[i * n + j] * y[j];
      y[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      cd s = y[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii * n + j] * y[j];
      y[ii] = s / a[ii * n + ii];
    }
    double nrm = 0.0;
    for (const cd& c : y) nrm += std::norm(c);
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) v[i] = y[i] / nrm;
  }
  return v;
}

// ---- matrix exponential ---------------------------------------------------

namespace {

double one_norm(const Mat& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

// Returns (U, V) with r(A) = (V − U)⁻¹(V + U).
template <std::size_t N>
std::pair<Mat, Mat> pade_low(const Mat& a, const std::array<double, N>& b) {
  const std::size_t n = a.rows();
  const Mat id = Mat::identity(n);
  const Mat a2 = a * a;
  Mat even = b[0] * id;
  Mat odd = b[1] * id;
  Mat power = id;
  for (std::size_t k = 2; k < N; k += 2) {
    power = power * a2;
    even += b[k] * power;
    if (k + 1 < N) odd += b[k + 1] * power;
  }
  return {a * odd, even};
}

std::pair<Mat, Mat> pade13(const Mat& a) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0, 129060195264000.0,
      10559470521600.0,    670442572800.0,      33522128640.0,      1323241920.0,       40840800.0,
      960960.0,            16380.0,             182.0,              1.0};
  const std::size_t n = a.rows();
  const Mat id = Mat::identity(n);
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;
  const Mat u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  const Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return {a * u_inner, v};
}

}  // namespace

Mat mat_exp(const Mat& m, double t) {
  require_square(m, "mat_exp");
  if (!std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "mat_exp: non-finite time");
  if (!m.all_finite()) throw Error(ErrorKind::Overflow, "mat_exp input is not finite");
  Mat a = m * t;
  const double norm = one_norm(a);

  static constexpr std::array<double, 4> b3 = {120.0, 60.0, 12.0, 1.0};
  static constexpr std::array<double, 6> b5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr std::array<double, 8> b7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                               25200.0,    1512.0,    56.0,      1.0};
  static constexpr std::array<double, 10> b9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                                2162160.0,     110880.0,     3960.0,       90.0,        1.0};

  int squarings = 0;
  std::pair<Mat, Mat> uv;
  if (norm <= 1.495585217958292e-2) {
    uv = pade_low(a, b3);
  } else if (norm <= 2.539398330063230e-1) {
    uv = pade_low(a, b5);
  } else if (norm <= 9.504178996162932e-1) {
    uv = pade_low(a, b7);
  } else if (norm <= 2.097847961257068) {
    uv = pade_low(a, b9);
  } else {
    constexpr double theta13 = 5.371920351148152;
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
    a *= std::ldexp(1.0, -squarings);
    uv = pade13(a);
  }
  const auto& [u, v] = uv;
  Mat result = lu_solve(v - u, v + u);
  for (int i = 0; i < squarings; ++i) {
    result = result * result;
    if (!result.all_finite()) break;
  }
  if (!result.all_finite() || result.max_abs() > std::numeric_limits<double>::max() / 4) {
    throw Error(ErrorKind::Overflow, "matrix exponential exceeds representable range");
  }
  return result;
}

// ---- Lyapunov -------------------------------------------------------------

bool is_hurwitz(const Mat& m) { return eig(m).spectral_abscissa() < -kHurwitzMargin; }

Mat solve_lyapunov(const Mat& phi, const Mat& q) {
  require_square(phi, "solve_lyapunov");
  require_square(q, "solve_lyapunov");
  if (q.rows() != phi.rows()) throw Error(ErrorKind::DimensionMismatch, "solve_lyapunov: Q and Phi differ in size");
  if (asymmetry(q) > kSymmetryTolerance * q.frobenius_norm()) {
    throw Error(ErrorKind::AsymmetricQ, "Q is not symmetric");
  }
  const double abscissa = eig(phi).spectral_abscissa();
  if (!(abscissa < -kHurwitzMargin)) {
    throw Error(ErrorKind::NotHurwitz, "Phi has an eigenvalue with real part " + std::to_string(abscissa));
  }
  const std::size_t n = phi.rows();
  const Mat id = Mat::identity(n);
  const Mat phit = phi.transpose();
  const Mat system = kron(id, phit) + kron(phit, id);

  // Column-major vec.
  Mat rhs(n * n, 1);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) rhs(i + j * n, 0) = -q(i, j);
  const Mat sol = lu_solve(system, rhs);
  Mat p(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) p(i, j) = sol(i + j * n, 0);
  return symmetrize(p);
}

// ---- symmetric ------------------------------------------------------------

void require_symmetric(const Mat& m, const char* what) {
  require_square(m, what);
  if (asymmetry(m) > kSymmetryTolerance * m.frobenius_norm()) {
    throw Error(ErrorKind::Asymmetric, std::string(what) + ": matrix is not symmetric");
  }
}

std::vector<double> symmetric_eigenvalues(const Mat& m) {
  require_square(m, "symmetric_eigenvalues");
  Mat a = symmetrize(m);
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off <= 1e-30 * std::max(1e-300, a.frobenius_norm() * a.frobenius_norm())) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

bool is_positive_definite(const Mat& m) {
  require_symmetric(m, "is_positive_definite");
  const double floor = 1e-12 * m.frobenius_norm();
  const auto ev = symmetric_eigenvalues(m);
  return !ev.empty() && ev.front() > floor && m.frobenius_norm() > 0.0;
}

}  // namespace pdattack
