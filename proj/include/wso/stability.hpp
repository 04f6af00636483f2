#pragma once

#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "wso/order.hpp"
#include "wso/rational_function.hpp"

namespace wso {

// ---- stability function -----------------------------------------------------

namespace detail {

/// det(I - zA + z e b^T) and det(I - zA) as polynomials in z.
template <ScalarType T>
std::pair<Polynomial<T>, Polynomial<T>> stability_determinants(const ButcherTableau<T>& t) {
  const std::size_t s = t.stages();
  const auto id = Matrix<T>::identity(s);
  Matrix<T> ebt(s, s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) ebt(i, j) = t.b()[j];
  const Matrix<T> minus_a = T(-1) * t.A();
  return {pencil_determinant(id, minus_a + ebt), pencil_determinant(id, minus_a)};
}

/// p / f for f(0) = 1, by power series from the constant term. Unlike long
/// division this keeps p(0) exact and does not amplify errors when the root
/// 1/lambda is large; the (near-zero) remainder lands in the dropped top terms.
inline Polynomial<double> divide_ascending(const Polynomial<double>& p, const Polynomial<double>& f) {
  const int n = p.degree() - f.degree();
  std::vector<double> q(static_cast<std::size_t>(std::max(n, 0)) + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    double acc = p.coeff(k);
    for (int i = 1; i <= f.degree() && i <= k; ++i) acc -= f.coeff(i) * q[static_cast<std::size_t>(k - i)];
    q[static_cast<std::size_t>(k)] = acc;
  }
  return Polynomial<double>(std::move(q), 0.0);
}

/// Removes factors (1 - lambda z) shared by num and den, lambda running over
/// the eigenvalues of A (the only possible roots of 1/den).
inline void deflate_common_factors(Polynomial<double>& num, Polynomial<double>& den, const Matrix<double>& a,
                                   bool lower_triangular, const Tolerances& tol) {
  std::vector<std::complex<double>> eig;
  const std::size_t s = a.rows();
  if (lower_triangular) {
    for (std::size_t i = 0; i < s; ++i) eig.emplace_back(a(i, i), 0.0);
  } else {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) eig.push_back(es.eigenvalues()(i));
  }
  auto vanishes = [&](const Polynomial<double>& p, std::complex<double> z) {
    double scale = 0.0;
    for (int i = 0; i <= p.degree(); ++i) scale += std::abs(p.coeff(i)) * std::pow(std::abs(z), i);
    return std::abs(p.evaluate(z)) <= tol.rank * std::max(1.0, scale);
  };
  for (const auto& lam : eig) {
    if (std::abs(lam) <= tol.zero || num.degree() < 1 || den.degree() < 1) continue;
    if (lam.imag() < -tol.zero) continue;  // handled with its conjugate
    const std::complex<double> root = 1.0 / lam;
    if (!vanishes(num, root) || !vanishes(den, root)) continue;
    Polynomial<double> f;
    if (std::abs(lam.imag()) <= tol.zero) {
      f = Polynomial<double>({1.0, -lam.real()});
    } else {
      f = Polynomial<double>({1.0, -2.0 * lam.real(), std::norm(lam)});
    }
    num = divide_ascending(num, f);
    den = divide_ascending(den, f);
  }
}

}  // namespace detail

/// R(z) = det(I - zA + z e b^T) / det(I - zA). Exact: reduced by gcd.
/// Float: common factors at eigenvalues of A deflated.
template <ScalarType T>
RationalFunction<T> stability_function(const ButcherTableau<T>& t, const Tolerances& tol = {}) {
  auto [num, den] = detail::stability_determinants(t);
  if constexpr (!is_exact_v<T>) {
    detail::deflate_common_factors(num, den, t.A(), is_lower_triangular(t.A(), false, tol), tol);
  }
  return RationalFunction<T>(std::move(num), std::move(den));
}

/// 1/k! for k = 0..n.
template <ScalarType T>
std::vector<T> exp_series(int n) {
  std::vector<T> e{T(1)};
  for (int k = 1; k <= n; ++k) e.push_back(e.back() / T(k));
  return e;
}

/// Largest p <= pmax with R(z) = e^z + O(z^{p+1}).
template <ScalarType T>
int order_vs_exp(const RationalFunction<T>& r, int pmax = 12, double tol = 1e-9) {
  const auto series = r.series(pmax + 1);
  const auto e = exp_series<T>(pmax + 1);
  auto same = [&](const T& x, const T& y) {
    if constexpr (is_exact_v<T>) {
      return x == y;
    } else {
      return std::abs(x - y) <= tol;
    }
  };
  if (!same(series[0], T(1))) throw Error("order_vs_exp: R(0) != 1");
  int p = 0;
  while (p < pmax && same(series[static_cast<std::size_t>(p + 1)], e[static_cast<std::size_t>(p + 1)])) ++p;
  return p;
}

// ---- W functions --------------------------------------------------------------

/// b^T adj(I - zA) tau^(k), via det(M + tau b^T) = det M + b^T adj(M) tau.
template <ScalarType T>
Polynomial<T> adjugate_numerator(const ButcherTableau<T>& t, int k) {
  const std::size_t s = t.stages();
  const Vector<T> tau = residual(t, k);
  Matrix<T> m0 = Matrix<T>::identity(s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) m0(i, j) += tau[i] * t.b()[j];
  const Matrix<T> minus_a = T(-1) * t.A();
  return pencil_determinant(m0, minus_a) - pencil_determinant(Matrix<T>::identity(s), minus_a);
}

/// W~_k(z) = z b^T (I - zA)^{-1} tau^(k).
template <ScalarType T>
RationalFunction<T> wtilde_k(const ButcherTableau<T>& t, int k) {
  const auto den = pencil_determinant(Matrix<T>::identity(t.stages()), T(-1) * t.A());
  return RationalFunction<T>(Polynomial<T>::x() * adjugate_numerator(t, k), den);
}

/// Polynomial zero test for W~_k (float: numerator coefficients within tol.zero).
template <ScalarType T>
bool wtilde_vanishes(const ButcherTableau<T>& t, int k, const Tolerances& tol = {}) {
  const auto num = adjugate_numerator(t, k);
  if constexpr (is_exact_v<T>) {
    return num.is_zero();
  } else {
    return num.max_abs_coeff() <= tol.zero * std::max(1.0, max_abs(residual(t, k)) * max_abs(t.b()) * t.stages());
  }
}

/// Weak stage order from W~_k == 0, k = 1, 2, ..., up to the saturation index.
template <ScalarType T>
OrderValue weak_stage_order_wtilde(const ButcherTableau<T>& t, const Tolerances& tol = {}) {
  const int horizon = saturation_index(t, tol);
  for (int k = 1; k <= horizon; ++k)
    if (!wtilde_vanishes(t, k, tol)) return OrderValue::finite(k - 1);
  return OrderValue::inf();
}

/// W_k(z) = k b^T (I - zA)^{-1} tau^(k) / (R(z) - 1). Powers of z common to
/// both sides are cancelled; a remaining pole at z = 0 is an error.
template <ScalarType T>
RationalFunction<T> w_k(const ButcherTableau<T>& t, int k, const Tolerances& tol = {}) {
  auto [ndet, ddet] = detail::stability_determinants(t);
  auto den = ndet - ddet;
  if (den.is_zero()) throw Error("W_k undefined: R(z) is identically 1");
  auto num = T(k) * adjugate_numerator(t, k);
  auto low_zero = [&](const Polynomial<T>& p) { return p.is_zero() || is_zero(p.coeff(0), tol); };
  auto shift = [](const Polynomial<T>& p) {
    std::vector<T> c(p.coeffs().begin() + (p.coeffs().empty() ? 0 : 1), p.coeffs().end());
    return Polynomial<T>(std::move(c));
  };
  while (low_zero(den) && low_zero(num) && !num.is_zero()) {
    den = shift(den);
    num = shift(num);
  }
  if (num.is_zero()) {
    while (low_zero(den)) den = shift(den);
  }
  if (low_zero(den)) throw Error("W_k has a pole at z = 0");
  return RationalFunction<T>(std::move(num), std::move(den));
}

// ---- moments, Hankel determinants, orthogonal basis ------------------------

inline Rational factorial(int n) {
  Rational f(1);
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// H_n(m): n x n with entries 1/(m+i+j-2)!, i, j = 1..n.
inline Matrix<Rational> hankel_matrix(int n, int m) {
  Matrix<Rational> h(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Rational(1) / factorial(m + i + j);
  return h;
}

inline Rational hankel_det(int n, int m) {
  if (n == 0) return Rational(1);
  return determinant(hankel_matrix(n, m));
}

/// M_n(m) = sigma(n) c(n) c(m+n-1) / c(m+2n-1), c(n) = prod_{i<n} i!,
/// sigma = +1 for n = 0, 1 (mod 4) and -1 otherwise.
inline Rational hankel_det_formula(int n, int m) {
  auto c = [](int k) {
    Rational p(1);
    for (int i = 1; i < k; ++i) p *= factorial(i);
    return p;
  };
  const int r = n % 4;
  const Rational sigma = (r == 0 || r == 1) ? Rational(1) : Rational(-1);
  return sigma * c(n) * c(m + n - 1) / c(m + 2 * n - 1);
}

/// M_n(m) from the Jacobi identity
/// M_n(m) M_{n-2}(m+2) = M_{n-1}(m+2) M_{n-1}(m) - M_{n-1}(m+1)^2, M_0 = 1, M_1(m) = 1/m!.
inline Rational hankel_det_jacobi(int n, int m) {
  if (n == 0) return Rational(1);
  if (n == 1) return Rational(1) / factorial(m);
  const Rational a = hankel_det_jacobi(n - 1, m + 2);
  const Rational b = hankel_det_jacobi(n - 1, m);
  const Rational c = hankel_det_jacobi(n - 1, m + 1);
  return (a * b - c * c) / hankel_det_jacobi(n - 2, m + 2);
}

enum class MomentVariant { standard, stiff };

inline int moment_shift(MomentVariant v) { return v == MomentVariant::standard ? 1 : 0; }

/// mu_n = 1/(n+1)! (standard) or 1/n! (stiff).
inline Rational moment(int n, MomentVariant v) { return Rational(1) / factorial(n + moment_shift(v)); }

/// L(x^n) = mu_n, extended linearly.
inline Rational functional_L(const Polynomial<Rational>& p, MomentVariant v = MomentVariant::standard) {
  Rational acc(0);
  for (int n = 0; n <= p.degree(); ++n) acc += p.coeff(n) * moment(n, v);
  return acc;
}

/// lambda_n(m) = -n/(m+2n-1), lambda_0 = 0.
inline Rational recurrence_lambda(int n, int m) {
  if (n == 0) return Rational(0);
  return Rational(-n, m + 2 * n - 1);
}

/// gamma_n(m) = lambda_{n+1}(m) - lambda_n(m).
inline Rational recurrence_gamma(int n, int m) { return recurrence_lambda(n + 1, m) - recurrence_lambda(n, m); }

/// beta_n(m) = n(m+n-1) / ((m+2n)(m+2n-1)^2(m+2n-2)).
inline Rational recurrence_beta(int n, int m) {
  const BigInt den = BigInt(m + 2 * n) * (m + 2 * n - 1) * (m + 2 * n - 1) * (m + 2 * n - 2);
  return Rational(BigInt(n) * (m + n - 1), den);
}

struct OrthoBasis {
  MomentVariant variant = MomentVariant::standard;
  std::vector<Polynomial<Rational>> polys;  // Q_0..Q_d, monic
  std::vector<Rational> zetas;              // L(Q_i^2)
  std::vector<Rational> gammas;             // gamma_0..gamma_{d-1}
  std::vector<Rational> betas;              // beta_0..beta_{d-1} (beta_0 unused, 0)
};

/// Monic orthogonal polynomials Q_{n+1} = (x + gamma_n) Q_n + beta_n Q_{n-1}
/// for the moment functional of `variant`.
inline OrthoBasis ortho_basis(int d, MomentVariant variant = MomentVariant::standard) {
  const int m = moment_shift(variant);
  OrthoBasis ob;
  ob.variant = variant;
  const auto x = Polynomial<Rational>::x();
  ob.polys.push_back(Polynomial<Rational>::one());
  for (int n = 0; n < d; ++n) {
    const Rational g = recurrence_gamma(n, m);
    const Rational b = n == 0 ? Rational(0) : recurrence_beta(n, m);
    ob.gammas.push_back(g);
    ob.betas.push_back(b);
    auto next = (x + Polynomial<Rational>::constant(g)) * ob.polys[static_cast<std::size_t>(n)];
    if (n > 0) next = next + b * ob.polys[static_cast<std::size_t>(n - 1)];
    ob.polys.push_back(next);
  }
  for (const auto& q : ob.polys) ob.zetas.push_back(functional_L(q * q, variant));
  return ob;
}

/// Standard basis from Q_0 = 1, Q_1 = x - 1/2, Q_{n+1} = x Q_n + xi_n^2 Q_{n-1},
/// xi_n^2 = 1/(4(4n^2 - 1)).
inline std::vector<Polynomial<Rational>> legendre_shifted_basis(int d) {
  std::vector<Polynomial<Rational>> q{Polynomial<Rational>::one()};
  if (d >= 1) q.push_back(Polynomial<Rational>({Rational(-1, 2), Rational(1)}));
  const auto x = Polynomial<Rational>::x();
  for (int n = 1; n < d; ++n) {
    const Rational xi2(1, 4 * (4 * n * n - 1));
    q.push_back(x * q[static_cast<std::size_t>(n)] + xi2 * q[static_cast<std::size_t>(n - 1)]);
  }
  return q;
}

/// Coefficients alpha_0..alpha_{d-1} with Q = Q_d + sum alpha_j Q_j (Q monic of degree d).
template <ScalarType T>
std::vector<T> expand_Q_in_basis(const Polynomial<T>& q, MomentVariant variant = MomentVariant::standard) {
  const int d = q.degree();
  if (d < 0) throw Error("expand_Q_in_basis: zero polynomial");
  const auto ob = ortho_basis(d, variant);
  auto cast = [](const Polynomial<Rational>& p) {
    std::vector<T> c;
    for (const auto& x : p.coeffs()) c.push_back(scalar_cast<T>(x));
    return Polynomial<T>(std::move(c), 0.0);
  };
  std::vector<T> alpha(static_cast<std::size_t>(d), T(0));
  std::vector<T> r(static_cast<std::size_t>(d) + 1, T(0));
  const auto rem = q.monic() - cast(ob.polys[static_cast<std::size_t>(d)]);
  for (int i = 0; i < d; ++i) r[static_cast<std::size_t>(i)] = rem.coeff(i);
  for (int j = d - 1; j >= 0; --j) {
    const T a = r[static_cast<std::size_t>(j)];
    alpha[static_cast<std::size_t>(j)] = a;
    const auto qj = cast(ob.polys[static_cast<std::size_t>(j)]);
    for (int i = 0; i <= j; ++i) r[static_cast<std::size_t>(i)] -= a * qj.coeff(i);
  }
  return alpha;
}

/// alpha_j = 0 for j <= p - d - 1.
template <ScalarType T>
bool check_orthogonality_lemma(const std::vector<T>& alpha, int p, const Tolerances& tol = {}) {
  const int d = static_cast<int>(alpha.size());
  for (int j = 0; j <= p - d - 1 && j < d; ++j)
    if (!is_zero(alpha[static_cast<std::size_t>(j)], tol)) return false;
  return true;
}

/// R(z) = 1 + z beta_0(z) with (I - z S^T) beta = e_1, S the matrix of
/// multiplication by x on span{Q_0..Q_{d-1}} modulo Q (standard basis).
template <ScalarType T>
RationalFunction<T> stability_from_alpha(const std::vector<T>& alpha, int p) {
  const int d = static_cast<int>(alpha.size());
  if (p < d) throw Error("stability_from_alpha requires p >= d");
  if (d == 0) return RationalFunction<T>(Polynomial<T>::one(), Polynomial<T>::one());
  const auto ob = ortho_basis(d, MomentVariant::standard);
  const auto n = static_cast<std::size_t>(d);
  Matrix<T> s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n) s(i, i + 1) = T(1);
    s(i, i) = -scalar_cast<T>(ob.gammas[i]);
    if (i > 0) s(i, i - 1) = -scalar_cast<T>(ob.betas[i]);
  }
  for (std::size_t j = 0; j < n; ++j) s(n - 1, j) -= alpha[j];
  const Matrix<T> st = T(-1) * s.transpose();
  const auto den = pencil_determinant(Matrix<T>::identity(n), st);
  // Cramer: replacing column 0 by e_1 leaves the minor without row and column 0.
  Matrix<T> minor(n - 1, n - 1);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j) minor(i - 1, j - 1) = st(i, j);
  const auto num = n == 1 ? Polynomial<T>::one() : pencil_determinant(Matrix<T>::identity(n - 1), minor);
  return RationalFunction<T>(den + Polynomial<T>::x() * num, den);
}

}  // namespace wso
