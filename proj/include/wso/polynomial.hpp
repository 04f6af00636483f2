#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "wso/matrix.hpp"

namespace wso {

/// Univariate polynomial with ascending coefficients, kept in canonical form:
/// no trailing zeros (float backend: trailing |coef| <= trim tolerance removed).
/// The zero polynomial has no coefficients and degree -1.
template <ScalarType T>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<T> coeffs, double trim_tol = Tolerances{}.trim)
      : c_(std::move(coeffs)) {
    trim(trim_tol);
  }
  Polynomial(std::initializer_list<T> coeffs) : Polynomial(std::vector<T>(coeffs)) {}

  static Polynomial constant(const T& a) { return Polynomial(std::vector<T>{a}); }
  static Polynomial one() { return constant(T(1)); }
  static Polynomial x() { return Polynomial(std::vector<T>{T(0), T(1)}); }
  static Polynomial monomial(int n, const T& a = T(1)) {
    std::vector<T> c(static_cast<std::size_t>(n) + 1, T(0));
    c.back() = a;
    return Polynomial(std::move(c));
  }
  /// (x - r) for each root.
  static Polynomial from_roots(const std::vector<T>& roots) {
    Polynomial p = one();
    for (const auto& r : roots) p = p * Polynomial(std::vector<T>{T(-r), T(1)});
    return p;
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<T>& coeffs() const { return c_; }
  T coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(i)] : T(0); }
  T leading() const { return c_.empty() ? T(0) : c_.back(); }
  bool is_monic() const { return !c_.empty() && c_.back() == T(1); }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& x : c_) m = std::max(m, std::abs(to_double(x)));
    return m;
  }

  Polynomial monic() const {
    if (c_.empty()) return *this;
    const T lead = c_.back();
    std::vector<T> c = c_;
    for (auto& x : c) x /= lead;
    c.back() = T(1);
    return Polynomial(std::move(c));
  }

  template <class U>
  U evaluate(const U& z) const {
    U acc = U(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + U(*it);
    return acc;
  }
  T operator()(const T& z) const { return evaluate(z); }

  /// p(A) by Horner's rule.
  Matrix<T> evaluate(const Matrix<T>& a) const {
    Matrix<T> acc(a.rows(), a.cols());
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * a + (*it) * Matrix<T>::identity(a.rows());
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<T> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = T(static_cast<int>(i)) * c_[i];
    return Polynomial(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(const T& s, const Polynomial& a) {
    std::vector<T> c = a.c_;
    for (auto& x : c) x *= s;
    return Polynomial(std::move(c));
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

  /// Evaluates to "x^2 - 1/2*x + 1/12"-style text (descending powers).
  std::string to_string(const std::string& var = "x") const {
    if (c_.empty()) return "0";
    std::string out;
    for (int i = degree(); i >= 0; --i) {
      const T& a = c_[static_cast<std::size_t>(i)];
      if (a == 0) continue;
      std::string coef = format_scalar(a);
      const bool neg = !coef.empty() && coef[0] == '-';
      if (neg) coef.erase(0, 1);
      out += out.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
      const bool unit_coef = coef == "1" && i > 0;
      if (!unit_coef) out += coef;
      if (i > 0) out += (unit_coef ? "" : "*") + var + (i > 1 ? "^" + std::to_string(i) : "");
    }
    return out;
  }

 private:
  void trim(double tol) {
    if constexpr (is_exact_v<T>) {
      while (!c_.empty() && c_.back() == 0) c_.pop_back();
    } else {
      while (!c_.empty() && std::abs(c_.back()) <= tol) c_.pop_back();
    }
  }

  std::vector<T> c_;
};

template <ScalarType T>
struct DivMod {
  Polynomial<T> quotient;
  Polynomial<T> remainder;
};

/// Euclidean division b = q a + r with deg r < deg a.
template <ScalarType T>
DivMod<T> divide(const Polynomial<T>& b, const Polynomial<T>& a) {
  if (a.is_zero()) throw Error("polynomial division by the zero polynomial");
  std::vector<T> r = b.coeffs();
  const int da = a.degree();
  const int db = b.degree();
  if (db < da) return {Polynomial<T>{}, b};
  std::vector<T> q(static_cast<std::size_t>(db - da + 1), T(0));
  const T lead = a.leading();
  for (int k = db - da; k >= 0; --k) {
    const T f = r[static_cast<std::size_t>(k + da)] / lead;
    q[static_cast<std::size_t>(k)] = f;
    for (int j = 0; j <= da; ++j) r[static_cast<std::size_t>(k + j)] -= f * a.coeffs()[static_cast<std::size_t>(j)];
    r[static_cast<std::size_t>(k + da)] = T(0);
  }
  r.resize(static_cast<std::size_t>(da));
  return {Polynomial<T>(std::move(q)), Polynomial<T>(std::move(r), 0.0)};
}

/// a | b. Float: ||r||_inf <= tol.divides * max(1, ||b||_inf).
template <ScalarType T>
bool divides(const Polynomial<T>& a, const Polynomial<T>& b, const Tolerances& tol = {}) {
  const auto r = divide(b, a).remainder;
  if constexpr (is_exact_v<T>) {
    return r.is_zero();
  } else {
    return r.max_abs_coeff() <= tol.divides * std::max(1.0, b.max_abs_coeff());
  }
}

/// Monic gcd (exact backend).
template <ScalarType T>
  requires(is_exact_v<T>)
Polynomial<T> gcd(Polynomial<T> a, Polynomial<T> b) {
  while (!b.is_zero()) {
    auto r = divide(a, b).remainder;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// Interpolating polynomial through (nodes[i], values[i]) via Newton divided differences.
template <ScalarType T>
Polynomial<T> interpolate(const std::vector<T>& nodes, std::vector<T> values, double trim_tol = Tolerances{}.trim) {
  const std::size_t n = nodes.size();
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t i = n - 1; i >= k; --i) {
      values[i] = (values[i] - values[i - 1]) / (nodes[i] - nodes[i - k]);
      if (i == k) break;
    }
  std::vector<T> acc;
  for (std::size_t i = n; i-- > 0;) {
    // acc = acc * (x - nodes[i]) + values[i]
    std::vector<T> next(acc.size() + 1, T(0));
    for (std::size_t j = 0; j < acc.size(); ++j) {
      next[j + 1] += acc[j];
      next[j] -= nodes[i] * acc[j];
    }
    next[0] += values[i];
    acc = std::move(next);
  }
  return Polynomial<T>(std::move(acc), trim_tol);
}

/// Interpolation nodes 0, 1, ..., n.
template <ScalarType T>
std::vector<T> integer_nodes(int n) {
  std::vector<T> z;
  for (int i = 0; i <= n; ++i) z.push_back(T(i));
  return z;
}

/// det(M0 + z M1) as a polynomial of degree <= n, by evaluation at z = 0..n and interpolation.
template <ScalarType T>
Polynomial<T> pencil_determinant(const Matrix<T>& m0, const Matrix<T>& m1) {
  const int n = static_cast<int>(m0.rows());
  const auto nodes = integer_nodes<T>(n);
  std::vector<T> vals;
  for (const auto& z : nodes) vals.push_back(determinant(m0 + z * m1));
  return interpolate(nodes, std::move(vals));
}

/// Characteristic polynomial det(xI - A), monic.
/// Exact: Faddeev-LeVerrier. Float: interpolation of det(xI - A) - x^n at n nodes.
template <ScalarType T>
Polynomial<T> char_poly(const Matrix<T>& a) {
  const std::size_t n = a.rows();
  std::vector<T> c(n + 1, T(0));
  c[n] = T(1);
  if constexpr (is_exact_v<T>) {
    Matrix<T> m(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
      m = a * m + c[n - k + 1] * Matrix<T>::identity(n);
      c[n - k] = -trace(a * m) / T(static_cast<int>(k));
    }
    return Polynomial<T>(std::move(c));
  } else {
    if (n == 0) return Polynomial<T>::one();
    std::vector<T> nodes, vals;
    for (std::size_t i = 0; i < n; ++i) {
      const T x = T(static_cast<double>(i));
      nodes.push_back(x);
      vals.push_back(determinant(x * Matrix<T>::identity(n) - a) - std::pow(x, static_cast<double>(n)));
    }
    const auto low = interpolate(nodes, std::move(vals), 0.0);
    for (std::size_t i = 0; i < n; ++i) c[i] = low.coeff(static_cast<int>(i));
    return Polynomial<T>(std::move(c));
  }
}

}  // namespace wso
