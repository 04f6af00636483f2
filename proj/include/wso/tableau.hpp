#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "wso/matrix.hpp"

namespace wso {

using Json = nlohmann::ordered_json;

/// Butcher tableau (A, b, c) of an s-stage Runge-Kutta scheme with c = A e.
/// Immutable after construction. Stage indices are 0-based throughout the API.
template <ScalarType T>
class ButcherTableau {
 public:
  using scalar_type = T;

  ButcherTableau(Matrix<T> a, Vector<T> b, std::string name = "", std::string source = "",
                 std::optional<Vector<T>> c = std::nullopt, const Tolerances& tol = {})
      : a_(std::move(a)), b_(std::move(b)), name_(std::move(name)), source_(std::move(source)) {
    if (a_.rows() == 0) throw ParseError("tableau must have at least one stage");
    if (!a_.square()) throw ParseError("A is not square");
    if (b_.size() != a_.rows()) throw ParseError("length of b does not match the stage count");
    c_ = a_ * ones<T>(a_.rows());
    if (c) {
      if (c->size() != c_.size()) throw ParseError("length of c does not match the stage count");
      for (std::size_t i = 0; i < c_.size(); ++i) {
        bool ok;
        if constexpr (is_exact_v<T>) {
          ok = (*c)[i] == c_[i];
        } else {
          ok = std::abs((*c)[i] - c_[i]) <= 1e-12 * std::max(1.0, std::abs(c_[i]));
        }
        if (!ok) throw ParseError("c is inconsistent with A e at stage " + std::to_string(i + 1));
      }
      if constexpr (!is_exact_v<T>) c_ = *c;
    }
    (void)tol;
  }

  std::size_t stages() const { return a_.rows(); }
  const Matrix<T>& A() const { return a_; }
  const Vector<T>& b() const { return b_; }
  const Vector<T>& c() const { return c_; }
  const std::string& name() const { return name_; }
  const std::string& source() const { return source_; }
  const Json& metadata() const { return metadata_; }
  static constexpr Backend backend() { return scalar_traits<T>::backend; }

  ButcherTableau with_metadata(Json meta) const {
    ButcherTableau t = *this;
    t.metadata_ = std::move(meta);
    return t;
  }
  ButcherTableau renamed(std::string name) const {
    ButcherTableau t = *this;
    t.name_ = std::move(name);
    return t;
  }

  friend bool operator==(const ButcherTableau& x, const ButcherTableau& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && x.c_ == y.c_ && x.name_ == y.name_;
  }

 private:
  Matrix<T> a_;
  Vector<T> b_;
  Vector<T> c_;
  std::string name_;
  std::string source_;
  Json metadata_ = Json::object();
};

using AnyTableau = std::variant<ButcherTableau<Rational>, ButcherTableau<double>>;

/// Binary64 copy of a tableau (exact entries rounded).
template <ScalarType T>
ButcherTableau<double> to_float(const ButcherTableau<T>& t) {
  if constexpr (std::is_same_v<T, double>) {
    return t;
  } else {
    const std::size_t s = t.stages();
    Matrix<double> a(s, s);
    Vector<double> b(s);
    for (std::size_t i = 0; i < s; ++i) {
      b[i] = to_double(t.b()[i]);
      for (std::size_t j = 0; j < s; ++j) a(i, j) = to_double(t.A()(i, j));
    }
    return ButcherTableau<double>(a, b, t.name(), t.source()).with_metadata(t.metadata());
  }
}

// ---- classification ---------------------------------------------------------

struct SchemeClassification {
  bool is_explicit = false;
  bool is_dirk = false;
  bool is_sdirk = false;
  bool is_edirk = false;
  bool is_gedirk = false;
  bool is_stiffly_accurate = false;
  bool a_invertible = false;
  int n_c = 0;
  std::optional<std::vector<std::vector<int>>> s_reducible_partition;
  std::vector<int> dj_reducible_stages;
};

/// Number of distinct abscissas; float ties within `tol.distinct` (chained).
template <ScalarType T>
int distinct_count(const Vector<T>& c, const Tolerances& tol = {}) {
  if (c.empty()) return 0;
  if constexpr (is_exact_v<T>) {
    return static_cast<int>(std::set<T>(c.begin(), c.end()).size());
  } else {
    std::vector<double> v(c.begin(), c.end());
    std::sort(v.begin(), v.end());
    int n = 1;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] - v[i - 1] > tol.distinct) ++n;
    return n;
  }
}

template <ScalarType T>
bool same_abscissa(const T& x, const T& y, const Tolerances& tol) {
  if constexpr (is_exact_v<T>) {
    return x == y;
  } else {
    return std::abs(x - y) <= tol.distinct;
  }
}

/// Index of the first zero abscissa, if any.
template <ScalarType T>
std::optional<std::size_t> first_zero_abscissa(const ButcherTableau<T>& t, const Tolerances& tol = {}) {
  for (std::size_t i = 0; i < t.stages(); ++i)
    if (same_abscissa(t.c()[i], T(0), tol)) return i;
  return std::nullopt;
}

template <ScalarType T>
bool is_lower_triangular(const Matrix<T>& a, bool strict, const Tolerances& tol) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = strict ? i : i + 1; j < a.cols(); ++j)
      if (!is_zero(a(i, j), tol)) return false;
  return true;
}

template <ScalarType T>
bool is_invertible(const Matrix<T>& a, const Tolerances& tol = {}) {
  const T det = determinant(a);
  if constexpr (is_exact_v<T>) {
    return det != 0;
  } else {
    const double scale = std::pow(std::max(1.0, a.max_abs()), static_cast<double>(a.rows()));
    return std::abs(det) > 1e-12 * scale;
    (void)tol;
  }
}

template <ScalarType T>
std::optional<std::vector<std::vector<int>>> s_reducibility(const ButcherTableau<T>& t, const Tolerances& tol = {});
template <ScalarType T>
std::vector<int> dj_reducibility(const ButcherTableau<T>& t, const Tolerances& tol = {});

template <ScalarType T>
SchemeClassification classify(const ButcherTableau<T>& t, const Tolerances& tol = {}) {
  SchemeClassification k;
  const auto& a = t.A();
  const std::size_t s = t.stages();
  k.is_dirk = is_lower_triangular(a, false, tol);
  k.is_explicit = is_lower_triangular(a, true, tol);
  if (k.is_dirk) {
    k.is_edirk = is_zero(a(0, 0), tol);
    bool equal_diag = !is_zero(a(0, 0), tol);
    for (std::size_t i = 1; i < s; ++i) equal_diag = equal_diag && nearly_equal(a(i, i), a(0, 0), tol);
    k.is_sdirk = equal_diag;
    if (const auto l = first_zero_abscissa(t, tol)) k.is_gedirk = is_zero(a(*l, *l), tol);
  }
  k.is_stiffly_accurate = true;
  for (std::size_t j = 0; j < s; ++j) k.is_stiffly_accurate = k.is_stiffly_accurate && nearly_equal(a(s - 1, j), t.b()[j], tol);
  k.a_invertible = is_invertible(a, tol);
  k.n_c = distinct_count(t.c(), tol);
  k.s_reducible_partition = s_reducibility(t, tol);
  k.dj_reducible_stages = dj_reducibility(t, tol);
  return k;
}

// ---- reducibility -----------------------------------------------------------

/// Coarsest partition of the stages with (e_i - e_j)^T A S^(m) = 0 for i, j in
/// a common block and every block indicator S^(m), found by partition
/// refinement from a single block. nullopt if only the all-singleton partition
/// survives. Blocks are ordered by their smallest stage.
template <ScalarType T>
std::optional<std::vector<std::vector<int>>> s_reducibility(const ButcherTableau<T>& t, const Tolerances& tol) {
  const auto& a = t.A();
  const int s = static_cast<int>(t.stages());
  std::vector<int> block(static_cast<std::size_t>(s), 0);
  int nblocks = 1;
  while (true) {
    // signature of row i: old block, then sums of row i over each current block
    std::vector<std::vector<T>> sig(static_cast<std::size_t>(s), std::vector<T>(static_cast<std::size_t>(nblocks), T(0)));
    for (int i = 0; i < s; ++i)
      for (int k = 0; k < s; ++k) sig[i][static_cast<std::size_t>(block[k])] += a(i, k);
    std::vector<int> next(static_cast<std::size_t>(s), -1);
    std::vector<int> reps;
    for (int i = 0; i < s; ++i) {
      for (int r : reps) {
        if (block[r] != block[i]) continue;
        bool same = true;
        for (int m = 0; m < nblocks && same; ++m) same = nearly_equal(sig[i][m], sig[r][m], tol);
        if (same) {
          next[i] = next[r];
          break;
        }
      }
      if (next[i] < 0) {
        next[i] = static_cast<int>(reps.size());
        reps.push_back(i);
      }
    }
    const int n = static_cast<int>(reps.size());
    block = std::move(next);
    if (n == nblocks) break;
    nblocks = n;
  }
  if (nblocks == s) return std::nullopt;
  std::vector<std::vector<int>> parts(static_cast<std::size_t>(nblocks));
  for (int i = 0; i < s; ++i) parts[static_cast<std::size_t>(block[i])].push_back(i);
  return parts;
}

/// True iff `parts` satisfies the S-reducibility condition (used by oracles and tests).
template <ScalarType T>
bool is_stage_equivalence(const ButcherTableau<T>& t, const std::vector<std::vector<int>>& parts,
                          const Tolerances& tol = {}) {
  const auto& a = t.A();
  for (const auto& bl : parts)
    for (const auto& target : parts) {
      T ref(0);
      for (int k : target) ref += a(bl.front(), k);
      for (int i : bl) {
        T sum(0);
        for (int k : target) sum += a(i, k);
        if (!nearly_equal(sum, ref, tol)) return false;
      }
    }
  return true;
}

/// The smaller scheme with one stage per block: a*_IJ = sum_{k in S_J} a_{rep(I),k},
/// b*_J = sum_{k in S_J} b_k, rep(I) = smallest stage of S_I.
template <ScalarType T>
ButcherTableau<T> contract(const ButcherTableau<T>& t, const std::vector<std::vector<int>>& parts) {
  const std::size_t r = parts.size();
  Matrix<T> a(r, r);
  Vector<T> b(r, T(0));
  for (std::size_t I = 0; I < r; ++I) {
    for (std::size_t J = 0; J < r; ++J)
      for (int k : parts[J]) a(I, J) += t.A()(static_cast<std::size_t>(parts[I].front()), static_cast<std::size_t>(k));
    for (int k : parts[I]) b[I] += t.b()[static_cast<std::size_t>(k)];
  }
  return ButcherTableau<T>(a, b, t.name() + " (contracted)", t.source());
}

/// Stages that can be dropped without changing u_{n+1}: stage j is removable
/// when b_j = 0 and a_ij = 0 for every retained stage i != j (to a fixed point).
template <ScalarType T>
std::vector<int> dj_reducibility(const ButcherTableau<T>& t, const Tolerances& tol) {
  const std::size_t s = t.stages();
  std::vector<bool> kept(s, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t j = 0; j < s; ++j) {
      if (!kept[j] || !is_zero(t.b()[j], tol)) continue;
      bool used = false;
      for (std::size_t i = 0; i < s && !used; ++i) used = kept[i] && i != j && !is_zero(t.A()(i, j), tol);
      if (!used) {
        kept[j] = false;
        changed = true;
      }
    }
  }
  std::vector<int> removed;
  for (std::size_t j = 0; j < s; ++j)
    if (!kept[j]) removed.push_back(static_cast<int>(j));
  return removed;
}

}  // namespace wso
