#pragma once

// Dense small-matrix utilities. The workhorse is smallest_singular_value(),
// the "how surjective is this map" measure used to quantify transversality of
// two graphs: for a wide map A : R^m -> R^n (m >= n) it is the n-th singular
// value, positive iff A is onto.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "solenoid/error.hpp"

namespace solenoid {

/// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
      fail(ErrorKind::Shape, "matrix entry count " + std::to_string(data_.size()) +
                                 " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) fail(ErrorKind::Shape, "ragged matrix initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> entries() const noexcept { return data_; }
  std::span<double> entries() noexcept { return data_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(double c) {
    for (double& v : data_) v *= c;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double c) { return a *= c; }
  friend Matrix operator*(double c, Matrix a) { return a *= c; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_)
      fail(ErrorKind::Shape, "product of " + a.shape() + " and " + b.shape());
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      fail(ErrorKind::Shape, "shape mismatch " + shape() + " vs " + o.shape());
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Singular values sorted non-increasing; length min(rows, cols).
struct SingularSpectrum {
  std::vector<double> values;

  double largest() const { return values.empty() ? 0.0 : values.front(); }
  double smallest() const { return values.empty() ? 0.0 : values.back(); }
};

namespace detail {

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations. Stops once the
// off-diagonal Frobenius norm drops below `tol`.
inline std::vector<double> jacobi_eigenvalues(Matrix s, double tol) {
  const std::size_t n = s.rows();
  auto off_norm = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) acc += s(i, j) * s(i, j);
    return std::sqrt(acc);
  };
  for (int sweep = 0; sweep < 100 && off_norm() >= tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (apq == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = s(i, i);
  return eig;
}

}  // namespace detail

/// Square roots of the eigenvalues of the smaller Gram matrix (A Aᵀ or AᵀA).
inline SingularSpectrum singular_values(const Matrix& a) {
  if (!a.all_finite()) fail(ErrorKind::InvalidInput, "matrix has non-finite entries");
  const bool wide = a.rows() <= a.cols();
  const Matrix gram = wide ? a * a.transpose() : a.transpose() * a;
  const double scale = a.frobenius_norm();
  SingularSpectrum out;
  if (gram.rows() == 0) return out;
  if (scale == 0.0) {
    out.values.assign(gram.rows(), 0.0);
    return out;
  }
  auto eig = detail::jacobi_eigenvalues(gram, 1e-13 * scale * scale);
  out.values.reserve(eig.size());
  for (double e : eig) out.values.push_back(std::sqrt(std::max(e, 0.0)));
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

/// Operator 2-norm, i.e. the largest singular value.
inline double operator_norm(const Matrix& a) { return singular_values(a).largest(); }

/// **m**(A) for a wide or square map A (cols >= rows): sqrt(λ_min(A Aᵀ)).
inline double smallest_singular_value(const Matrix& a) {
  if (a.rows() > a.cols())
    fail(ErrorKind::Shape, "smallest singular value needs cols >= rows, got " + a.shape());
  if (a.rows() == 0) fail(ErrorKind::Shape, "smallest singular value of an empty map");
  return singular_values(a).smallest();
}

}  // namespace solenoid
