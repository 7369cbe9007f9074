#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pdattack {

class Vec;

/// Dense row-major real matrix. Construction from caller data rejects
/// non-finite entries; arithmetic results are not re-validated.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols);
  Mat(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat zeros(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }
  static Mat identity(std::size_t n);
  static Mat diag(std::span<const double> d);
  static Mat column(const Vec& v);
  static Mat outer(const Vec& a, const Vec& b);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  Mat transpose() const;
  double trace() const;
  double frobenius_norm() const;
  /// Maximum absolute row sum.
  double inf_norm() const;
  double max_abs() const;
  bool all_finite() const;

  /// Copy of the sub-block starting at (r0, c0).
  Mat block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const;
  void set_block(std::size_t r0, std::size_t c0, const Mat& m);

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Dense real vector.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n) : data_(n, 0.0) {}
  explicit Vec(std::vector<double> v);
  Vec(std::initializer_list<double> v);

  static Vec filled(std::size_t n, double value);
  static Vec unit(std::size_t n, std::size_t i);

  std::size_t dim() const { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double norm() const;
  double dot(const Vec& o) const;
  bool all_finite() const;

  Vec& operator+=(const Vec& o);
  Vec& operator-=(const Vec& o);
  Vec& operator*=(double s);

  friend bool operator==(const Vec&, const Vec&) = default;

 private:
  std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator-(Mat a);
Mat operator*(Mat a, double s);
Mat operator*(double s, Mat a);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, const Vec& x);

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator-(Vec a);
Vec operator*(Vec a, double s);
Vec operator*(double s, Vec a);

/// (M + Mᵀ) / 2.
Mat symmetrize(const Mat& m);
/// ‖M − Mᵀ‖_F.
double asymmetry(const Mat& m);
/// Kronecker product A ⊗ B.
Mat kron(const Mat& a, const Mat& b);
double det(const Mat& m);

}  // namespace pdattack
