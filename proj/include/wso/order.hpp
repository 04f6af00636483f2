#pragma once

#include <climits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wso/rooted_trees.hpp"
#include "wso/subspace.hpp"
#include "wso/tableau.hpp"

namespace wso {

/// An order that may be infinite (weak stage order of e.g. explicit Euler).
struct OrderValue {
  int value = 0;
  bool infinite = false;

  static OrderValue finite(int q) { return {q, false}; }
  static OrderValue inf() { return {INT_MAX, true}; }
  bool at_least(int q) const { return infinite || value >= q; }
  std::string str() const { return infinite ? "inf" : std::to_string(value); }
  friend bool operator==(const OrderValue&, const OrderValue&) = default;
};

/// tau^(k) = A c^{k-1} - c^k / k for k = 1..kmax (index 0 holds k = 1).
template <ScalarType T>
std::vector<Vector<T>> residuals(const ButcherTableau<T>& t, int kmax) {
  std::vector<Vector<T>> r;
  for (int k = 1; k <= kmax; ++k) {
    const Vector<T> ck1 = pow_elementwise(t.c(), k - 1);
    const Vector<T> ck = pow_elementwise(t.c(), k);
    r.push_back(t.A() * ck1 - (T(1) / T(k)) * ck);
  }
  return r;
}

template <ScalarType T>
Vector<T> residual(const ButcherTableau<T>& t, int k) {
  return residuals(t, k).back();
}

namespace detail {

/// Zero test for an inner product y^T v, scaled by sum |y_i v_i|.
template <ScalarType T>
bool inner_is_zero(const Vector<T>& y, const Vector<T>& v, const Tolerances& tol) {
  const T d = dot(y, v);
  if constexpr (is_exact_v<T>) {
    return d == 0;
  } else {
    double scale = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) scale += std::abs(y[i] * v[i]);
    return is_zero(d, tol, scale);
  }
}

}  // namespace detail

/// B(xi): b^T c^{k-1} = 1/k for k <= xi.
template <ScalarType T>
bool check_B(const ButcherTableau<T>& t, int xi, const Tolerances& tol = {}) {
  for (int k = 1; k <= xi; ++k) {
    const T lhs = dot(t.b(), pow_elementwise(t.c(), k - 1));
    if (!nearly_equal(lhs, T(1) / T(k), tol)) return false;
  }
  return true;
}

/// C(xi): tau^(k) = 0 for k <= xi.
template <ScalarType T>
bool check_C(const ButcherTableau<T>& t, int xi, const Tolerances& tol = {}) {
  for (const auto& tau : residuals(t, xi))
    if (!is_zero_vector(tau, tol)) return false;
  return true;
}

/// Largest xi with B(xi); finite because no s-point rule integrates every power.
template <ScalarType T>
int quadrature_order(const ButcherTableau<T>& t, const Tolerances& tol = {}) {
  int xi = 0;
  while (xi < 2 * static_cast<int>(t.stages()) + 2 && check_B(t, xi + 1, tol)) ++xi;
  return xi;
}

/// Largest xi with C(xi), searched up to `cap`.
template <ScalarType T>
int stage_condition_order(const ButcherTableau<T>& t, int cap, const Tolerances& tol = {}) {
  int xi = 0;
  while (xi < cap && check_C(t, xi + 1, tol)) ++xi;
  return xi;
}

/// Largest p <= pmax with Phi(t) = 1/gamma(t) for every rooted tree of order <= p.
template <ScalarType T>
int classical_order(const ButcherTableau<T>& t, int pmax = 6, const Tolerances& tol = {}) {
  if (pmax > 6) throw Error("classical_order supports pmax <= 6");
  const auto trees = rooted_trees(pmax);
  for (int p = 1; p <= pmax; ++p) {
    for (const auto& tree : trees[static_cast<std::size_t>(p)]) {
      const T phi = elementary_weight(tree, t.A(), t.b());
      if (!nearly_equal(phi, T(1) / T(static_cast<int>(tree.density())), tol)) return p - 1;
    }
  }
  return pmax;
}

/// Generating index after which K_m stops growing: 2 n_c, or 2 n_c - 1 when
/// some abscissa is zero.
template <ScalarType T>
int saturation_index(const ButcherTableau<T>& t, const Tolerances& tol = {}) {
  const int nc = distinct_count(t.c(), tol);
  return first_zero_abscissa(t, tol) ? 2 * nc - 1 : 2 * nc;
}

/// True iff b^T A^j tau^(k) = 0 for 0 <= j <= s-1.
template <ScalarType T>
bool satisfies_S_at(const ButcherTableau<T>& t, int k, const Tolerances& tol = {}) {
  Vector<T> v = residual(t, k);
  for (std::size_t j = 0; j < t.stages(); ++j) {
    if (!detail::inner_is_zero(t.b(), v, tol)) return false;
    v = t.A() * v;
  }
  return true;
}

/// Weak stage order from its definition: the largest q with S(q). Generation
/// stops at the saturation index (or `kcap` when larger); passing there means inf.
template <ScalarType T>
OrderValue weak_stage_order(const ButcherTableau<T>& t, std::optional<int> kcap = std::nullopt,
                            const Tolerances& tol = {}) {
  const int horizon = std::max(saturation_index(t, tol), kcap.value_or(0));
  for (int k = 1; k <= horizon; ++k)
    if (!satisfies_S_at(t, k, tol)) return OrderValue::finite(k - 1);
  return OrderValue::inf();
}

/// K_m = span{A^j tau^(k) : 0 <= j <= s-1, 1 <= k <= m}.
template <ScalarType T>
SubspaceBasis<T> space_K(const ButcherTableau<T>& t, int m, const Tolerances& tol = {}) {
  const std::size_t s = t.stages();
  std::vector<Vector<T>> gens;
  if (m >= 1) {
    for (auto v : residuals(t, m)) {
      for (std::size_t j = 0; j < s; ++j) {
        gens.push_back(v);
        v = t.A() * v;
      }
    }
  }
  return SubspaceBasis<T>::span(gens, s, tol, SubspaceKind::K, m);
}

/// Y = span{(A^T)^j b : 0 <= j <= s-1}.
template <ScalarType T>
SubspaceBasis<T> space_Y(const ButcherTableau<T>& t, const Tolerances& tol = {}) {
  const std::size_t s = t.stages();
  const Matrix<T> at = t.A().transpose();
  std::vector<Vector<T>> gens;
  Vector<T> v = t.b();
  for (std::size_t j = 0; j < s; ++j) {
    gens.push_back(v);
    v = at * v;
  }
  return SubspaceBasis<T>::span(gens, s, tol, SubspaceKind::Y);
}

/// K_q for the weak stage order q (the saturated space when q is infinite).
template <ScalarType T>
SubspaceBasis<T> space_K_at(const ButcherTableau<T>& t, const OrderValue& q, const Tolerances& tol = {}) {
  return space_K(t, q.infinite ? saturation_index(t, tol) : q.value, tol);
}

struct OrthogonalityReport {
  OrderValue q_definition;
  OrderValue q_subspace;
  int dim_Y = 0;
  int dim_K = 0;  // dim K_q
  bool dimension_bound = true;  // dim Y + dim K_q <= s
  bool agree() const { return q_definition == q_subspace; }
};

/// Weak stage order as the largest q with Y orthogonal to K_q.
template <ScalarType T>
OrderValue weak_stage_order_subspace(const ButcherTableau<T>& t, const SubspaceBasis<T>& y,
                                     const Tolerances& tol = {}) {
  const int horizon = saturation_index(t, tol);
  for (int q = 1; q <= horizon; ++q)
    if (!y.orthogonal_to(space_K(t, q, tol))) return OrderValue::finite(q - 1);
  return OrderValue::inf();
}

template <ScalarType T>
OrthogonalityReport verify_wso_orthogonality(const ButcherTableau<T>& t, const Tolerances& tol = {}) {
  OrthogonalityReport r;
  const auto y = space_Y(t, tol);
  r.q_definition = weak_stage_order(t, std::nullopt, tol);
  r.q_subspace = weak_stage_order_subspace(t, y, tol);
  r.dim_Y = static_cast<int>(y.dim());
  r.dim_K = static_cast<int>(space_K_at(t, r.q_definition, tol).dim());
  r.dimension_bound = r.dim_Y + r.dim_K <= static_cast<int>(t.stages());
  return r;
}

struct AlbrechtResult {
  bool ok = true;
  std::optional<std::pair<int, int>> violation;  // (j, k)
};

/// b^T A^j tau^(k) = 0 for j >= 0, k >= 1, j + k <= p - 1; implied by classical order p.
template <ScalarType T>
AlbrechtResult check_albrecht(const ButcherTableau<T>& t, int p, const Tolerances& tol = {}) {
  AlbrechtResult r;
  for (int k = 1; k <= p - 1; ++k) {
    Vector<T> v = residual(t, k);
    for (int j = 0; j + k <= p - 1; ++j) {
      if (!detail::inner_is_zero(t.b(), v, tol)) {
        r.ok = false;
        r.violation = {j, k};
        return r;
      }
      v = t.A() * v;
    }
  }
  return r;
}

}  // namespace wso
