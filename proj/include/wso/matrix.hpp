#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <optional>
#include <vector>

#include "wso/scalar.hpp"

namespace wso {

template <ScalarType T>
using Vector = std::vector<T>;

/// Small dense row-major matrix. Sizes here are the stage count (s <= ~10),
/// so clarity wins over blocking or expression templates.
template <ScalarType T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.front().size() : 0;
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      assert(rows[i].size() == c);
      for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static Matrix from_columns(const std::vector<Vector<T>>& cols, std::size_t rows) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vector<T> row(std::size_t i) const { return Vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_); }
  Vector<T> col(std::size_t j) const {
    Vector<T> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Upper-left n x n block.
  Matrix leading_block(std::size_t n) const {
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b(i, j) = (*this)(i, j);
    return b;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, std::abs(to_double(x)));
    return m;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.cols_ == b.rows_);
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }

  friend Vector<T> operator*(const Matrix& a, const Vector<T>& x) {
    assert(a.cols_ == x.size());
    Vector<T> y(a.rows_, T(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
    return y;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }
  friend Matrix operator-(Matrix a, const Matrix& b) {
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }
  friend Matrix operator*(const T& s, Matrix a) {
    for (auto& x : a.data_) x *= s;
    return a;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  const std::vector<T>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// ---- vector helpers ---------------------------------------------------------

template <ScalarType T>
T dot(const Vector<T>& a, const Vector<T>& b) {
  assert(a.size() == b.size());
  T s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <ScalarType T>
Vector<T> operator+(Vector<T> a, const Vector<T>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

template <ScalarType T>
Vector<T> operator-(Vector<T> a, const Vector<T>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

template <ScalarType T>
Vector<T> operator*(const T& s, Vector<T> a) {
  for (auto& x : a) x *= s;
  return a;
}

template <ScalarType T>
Vector<T> ones(std::size_t n) {
  return Vector<T>(n, T(1));
}

template <ScalarType T>
Vector<T> unit(std::size_t n, std::size_t i) {
  Vector<T> e(n, T(0));
  e[i] = T(1);
  return e;
}

/// Componentwise power c^k (k >= 0).
template <ScalarType T>
Vector<T> pow_elementwise(const Vector<T>& c, int k) {
  Vector<T> r(c.size(), T(1));
  for (std::size_t i = 0; i < c.size(); ++i)
    for (int j = 0; j < k; ++j) r[i] *= c[i];
  return r;
}

template <ScalarType T>
double max_abs(const Vector<T>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(to_double(x)));
  return m;
}

template <ScalarType T>
bool is_zero_vector(const Vector<T>& v, const Tolerances& tol, double scale = 1.0) {
  return std::all_of(v.begin(), v.end(), [&](const T& x) { return is_zero(x, tol, scale); });
}

template <ScalarType T>
Vector<T> row_times(const Vector<T>& y, const Matrix<T>& a) {  // y^T A
  return a.transpose() * y;
}

template <ScalarType T>
Matrix<T> matrix_power(const Matrix<T>& a, int n) {
  Matrix<T> r = Matrix<T>::identity(a.rows());
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}

template <ScalarType T>
T trace(const Matrix<T>& a) {
  T t(0);
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

// ---- elimination ------------------------------------------------------------

namespace detail {

/// Pivot choice: first nonzero entry (exact) or largest magnitude (float).
template <ScalarType T>
std::optional<std::size_t> pick_pivot(const Matrix<T>& m, std::size_t col, std::size_t from, double scale,
                                      const Tolerances& tol) {
  std::optional<std::size_t> best;
  double best_mag = -1.0;
  for (std::size_t i = from; i < m.rows(); ++i) {
    if constexpr (is_exact_v<T>) {
      if (m(i, col) != 0) return i;
    } else {
      const double mag = std::abs(m(i, col));
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
  }
  if constexpr (!is_exact_v<T>) {
    if (best && best_mag <= tol.zero * 1e-3 * std::max(1.0, scale)) return std::nullopt;
  }
  return best;
}

template <ScalarType T>
void swap_rows(Matrix<T>& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}

}  // namespace detail

/// Determinant by Gaussian elimination (exact over Q; partial pivoting in float).
template <ScalarType T>
T determinant(Matrix<T> m) {
  assert(m.square());
  const std::size_t n = m.rows();
  T det(1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    if constexpr (is_exact_v<T>) {
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return T(0);
    } else {
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
      if (m(p, k) == 0.0) return 0.0;
    }
    if (p != k) {
      detail::swap_rows(m, p, k);
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      const T f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

/// Solves M X = B for square M; nullopt if M is (numerically) singular.
template <ScalarType T>
std::optional<Matrix<T>> solve(Matrix<T> m, Matrix<T> rhs, const Tolerances& tol = {}) {
  assert(m.square() && rhs.rows() == m.rows());
  const std::size_t n = m.rows();
  const double scale = m.max_abs();
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = detail::pick_pivot(m, k, k, scale, tol);
    if (!p) return std::nullopt;
    detail::swap_rows(m, *p, k);
    detail::swap_rows(rhs, *p, k);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m(i, k) == 0) continue;
      const T f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      for (std::size_t j = 0; j < rhs.cols(); ++j) rhs(i, j) -= f * rhs(k, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < rhs.cols(); ++j) rhs(i, j) /= m(i, i);
  return rhs;
}

template <ScalarType T>
std::optional<Vector<T>> solve(const Matrix<T>& m, const Vector<T>& rhs, const Tolerances& tol = {}) {
  auto x = solve(m, Matrix<T>::from_columns({rhs}, rhs.size()), tol);
  if (!x) return std::nullopt;
  return x->col(0);
}

}  // namespace wso
