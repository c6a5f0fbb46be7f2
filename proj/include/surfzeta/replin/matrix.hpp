#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "surfzeta/error.hpp"

namespace surfzeta::replin {

/// Small dense row-major matrix.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T{}) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  DenseMatrix operator*(const DenseMatrix& o) const {
    if (cols_ != o.rows_) throw Error(ErrorKind::input, "matrix shape mismatch in product");
    DenseMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t k = 0; k < cols_; ++k) {
        const T a = (*this)(i, k);
        if (a == T{}) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
      }
    }
    return r;
  }

  DenseMatrix operator-(const DenseMatrix& o) const {
    DenseMatrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
    return r;
  }

  DenseMatrix& operator*=(T s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  double max_abs() const {
    double m = 0;
    for (const auto& x : data_) m = std::max(m, static_cast<double>(std::abs(x)));
    return m;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Matrix = DenseMatrix<double>;
using CMatrix = DenseMatrix<std::complex<double>>;

/// Determinant by LU with partial pivoting.
template <class T>
T determinant(DenseMatrix<T> a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw Error(ErrorKind::input, "determinant of non-square matrix");
  T det{1};
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    }
    if (a(piv, c) == T{}) return T{};
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a(c, k), a(piv, k));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const T f = a(r, c) / a(c, c);
      for (std::size_t k = c; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return det;
}

/// Inverse by Gauss-Jordan with partial pivoting; numeric error when singular.
template <class T>
DenseMatrix<T> inverse(DenseMatrix<T> a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw Error(ErrorKind::input, "inverse of non-square matrix");
  auto inv = DenseMatrix<T>::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    }
    if (std::abs(a(piv, c)) == 0.0) throw Error(ErrorKind::numeric, "singular matrix");
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(a(c, k), a(piv, k));
      std::swap(inv(c, k), inv(piv, k));
    }
    const T d = a(c, c);
    for (std::size_t k = 0; k < n; ++k) {
      a(c, k) /= d;
      inv(c, k) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a(r, c) == T{}) continue;
      const T f = a(r, c);
      for (std::size_t k = 0; k < n; ++k) {
        a(r, k) -= f * a(c, k);
        inv(r, k) -= f * inv(c, k);
      }
    }
  }
  return inv;
}

/// Frobenius norm of m - s I.
template <class T>
double distance_to_scalar(const DenseMatrix<T>& m, T s) {
  double acc = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const T d = m(i, j) - (i == j ? s : T{});
      acc += std::norm(d);
    }
  }
  return std::sqrt(acc);
}

}  // namespace surfzeta::replin
