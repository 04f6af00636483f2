#pragma once

#include <vector>

#include <Eigen/Dense>

#include "wso/order.hpp"
#include "wso/polynomial.hpp"

namespace wso {

template <ScalarType T>
struct MinPolyResult {
  Polynomial<T> poly;
  double residual = 0.0;  // ||p(X)||_max / max(1, ||X^d||_max); 0 on the exact backend
};

/// Minimal polynomial of a square matrix X: the first power X^d that is a
/// combination of I, X, ..., X^{d-1}. Exact: exact membership and solve.
/// Float: least squares, accepted when the residual is <= tol.rank * scale.
template <ScalarType T>
MinPolyResult<T> minimal_polynomial(const Matrix<T>& x, const Tolerances& tol = {}) {
  const std::size_t n = x.rows();
  if (n == 0) return {Polynomial<T>::one(), 0.0};
  std::vector<Vector<T>> powers{Matrix<T>::identity(n).data()};
  Matrix<T> xk = Matrix<T>::identity(n);
  for (std::size_t d = 1; d <= n; ++d) {
    xk = xk * x;
    const Vector<T> target = xk.data();
    if constexpr (is_exact_v<T>) {
      const auto span = SubspaceBasis<T>::span(powers, n * n, tol);
      if (span.contains(target)) {
        // Normal equations on independent columns: G c = -M^T v.
        const std::size_t k = powers.size();
        Matrix<T> g(k, k);
        Vector<T> rhs(k);
        for (std::size_t i = 0; i < k; ++i) {
          rhs[i] = -dot(powers[i], target);
          for (std::size_t j = 0; j < k; ++j) g(i, j) = dot(powers[i], powers[j]);
        }
        const auto c = solve(g, rhs, tol);
        if (!c) throw ConsistencyError("minimal polynomial: singular Gram matrix");
        std::vector<T> coeffs = *c;
        coeffs.push_back(T(1));
        return {Polynomial<T>(std::move(coeffs)), 0.0};
      }
    } else {
      const auto rows = static_cast<Eigen::Index>(n * n);
      const auto cols = static_cast<Eigen::Index>(powers.size());
      Eigen::MatrixXd m(rows, cols);
      Eigen::VectorXd v(rows);
      for (Eigen::Index i = 0; i < rows; ++i) {
        v(i) = -target[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = powers[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      }
      const Eigen::VectorXd c = m.colPivHouseholderQr().solve(v);
      const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
      const double res = (m * c - v).cwiseAbs().maxCoeff() / scale;
      if (res <= tol.rank) {
        std::vector<double> coeffs(c.data(), c.data() + c.size());
        coeffs.push_back(1.0);
        return {Polynomial<double>(std::move(coeffs), 0.0), res};
      }
    }
    powers.push_back(target);
  }
  // Cayley-Hamilton: never reached for consistent input.
  throw ConsistencyError("minimal polynomial search exceeded the matrix size");
}

/// Minimal monic p with p(A) u = 0 for every u in the A-invariant subspace U,
/// via the restriction X with A U = U X.
template <ScalarType T>
MinPolyResult<T> min_poly_on_subspace(const Matrix<T>& a, const SubspaceBasis<T>& u, const Tolerances& tol = {}) {
  if (u.dim() == 0) return {Polynomial<T>::one(), 0.0};
  if (!u.invariant_under(a)) throw ConsistencyError("subspace is not invariant under the matrix");
  return minimal_polynomial(u.restriction(a), tol);
}

/// Q: minimal polynomial of A^T on Y, so b^T Q(A) = 0 and deg Q = dim Y.
template <ScalarType T>
Polynomial<T> poly_Q(const ButcherTableau<T>& t, const Tolerances& tol = {}) {
  const auto y = space_Y(t, tol);
  auto q = min_poly_on_subspace(t.A().transpose(), y, tol).poly;
  if (q.degree() != static_cast<int>(y.dim())) throw ConsistencyError("deg Q differs from dim Y");
  return q;
}

/// P: minimal polynomial of A on K_q, so P(A) tau^(k) = 0 for k <= q. P = 1 when q < 2.
template <ScalarType T>
Polynomial<T> poly_P(const ButcherTableau<T>& t, const OrderValue& q, const Tolerances& tol = {}) {
  if (!q.at_least(2)) return Polynomial<T>::one();
  return min_poly_on_subspace(t.A(), space_K_at(t, q, tol), tol).poly;
}

template <ScalarType T>
Polynomial<T> poly_P(const ButcherTableau<T>& t, const Tolerances& tol = {}) {
  return poly_P(t, weak_stage_order(t, std::nullopt, tol), tol);
}

template <ScalarType T>
struct Factorization {
  Polynomial<T> P;
  Polynomial<T> Q;
  Polynomial<T> N;
  Polynomial<T> char_A;
};

/// char_A = P Q N, with P Q | char_A checked (exact, or coefficientwise within tol.factor).
template <ScalarType T>
Factorization<T> factorization(const ButcherTableau<T>& t, const OrderValue& q, const Tolerances& tol = {}) {
  Factorization<T> f;
  f.P = poly_P(t, q, tol);
  f.Q = poly_Q(t, tol);
  f.char_A = char_poly(t.A());
  const auto pq = f.P * f.Q;
  const auto dm = divide(f.char_A, pq);
  if (!divides(pq, f.char_A, tol)) throw ConsistencyError("P Q does not divide char_A");
  f.N = dm.quotient;
  const auto back = pq * f.N;
  if constexpr (is_exact_v<T>) {
    if (!(back == f.char_A)) throw ConsistencyError("char_A != P Q N");
  } else {
    const double scale = std::max(1.0, f.char_A.max_abs_coeff());
    for (int i = 0; i <= f.char_A.degree(); ++i)
      if (std::abs(back.coeff(i) - f.char_A.coeff(i)) > tol.factor * scale) throw ConsistencyError("char_A != P Q N");
  }
  return f;
}

template <ScalarType T>
Factorization<T> factorization(const ButcherTableau<T>& t, const Tolerances& tol = {}) {
  return factorization(t, weak_stage_order(t, std::nullopt, tol), tol);
}

}  // namespace wso
