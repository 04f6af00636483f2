#pragma once

// Reference computations that share no code with the library routes they check.

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "wso/wso.hpp"

namespace oracle {

using wso::Rational;
using Dense = std::vector<std::vector<Rational>>;

inline Dense dense(const wso::Matrix<Rational>& m) {
  Dense d(m.rows(), std::vector<Rational>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

/// Rank by fraction-free (Bareiss) elimination.
inline int bareiss_rank(Dense m) {
  const std::size_t rows = m.size();
  if (rows == 0) return 0;
  const std::size_t cols = m[0].size();
  Rational prev(1);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev;
      m[i][c] = 0;
    }
    prev = m[r][c];
    ++r;
  }
  return static_cast<int>(r);
}

/// Rank of a list of vectors (as rows).
inline int rank_of(const std::vector<std::vector<Rational>>& vs) { return vs.empty() ? 0 : bareiss_rank(vs); }

/// Leibniz expansion over all permutations.
inline Rational leibniz_det(const Dense& m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rational total(0);
  do {
    Rational term(1);
    for (std::size_t i = 0; i < n; ++i) term *= m[i][perm[i]];
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    total += inversions % 2 ? -term : term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline std::vector<Rational> mat_vec(const Dense& a, const std::vector<Rational>& v) {
  std::vector<Rational> out(a.size(), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
  return out;
}

inline Dense transpose(const Dense& a) {
  Dense t(a.empty() ? 0 : a[0].size(), std::vector<Rational>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline Rational inner(const std::vector<Rational>& x, const std::vector<Rational>& y) {
  Rational s(0);
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline std::vector<Rational> tau(const wso::ButcherTableau<Rational>& t, int k) {
  const Dense a = dense(t.A());
  const std::size_t s = t.stages();
  std::vector<Rational> c(s, Rational(0)), ck1(s), ck(s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) c[i] += a[i][j];
  for (std::size_t i = 0; i < s; ++i) {
    ck1[i] = 1;
    for (int p = 0; p < k - 1; ++p) ck1[i] *= c[i];
    ck[i] = ck1[i] * c[i];
  }
  auto out = mat_vec(a, ck1);
  for (std::size_t i = 0; i < s; ++i) out[i] -= ck[i] / k;
  return out;
}

/// Weak stage order straight from the definition, scanning k up to `kmax`;
/// nullopt stands for "no failure found up to kmax".
inline std::optional<int> wso_definition(const wso::ButcherTableau<Rational>& t, int kmax) {
  const Dense a = dense(t.A());
  const std::vector<Rational> b(t.b().begin(), t.b().end());
  for (int k = 1; k <= kmax; ++k) {
    auto v = tau(t, k);
    for (std::size_t j = 0; j < t.stages(); ++j) {
      if (inner(b, v) != 0) return k - 1;
      v = mat_vec(a, v);
    }
  }
  return std::nullopt;
}

/// dim of the Krylov space of A over the given generators.
inline int krylov_dim(const Dense& a, std::vector<std::vector<Rational>> gens) {
  std::vector<std::vector<Rational>> all;
  for (auto v : gens)
    for (std::size_t j = 0; j < a.size(); ++j) {
      all.push_back(v);
      v = mat_vec(a, v);
    }
  return rank_of(all);
}

inline int dim_Y(const wso::ButcherTableau<Rational>& t) {
  return krylov_dim(transpose(dense(t.A())), {std::vector<Rational>(t.b().begin(), t.b().end())});
}

inline int dim_K(const wso::ButcherTableau<Rational>& t, int m) {
  std::vector<std::vector<Rational>> gens;
  for (int k = 1; k <= m; ++k) gens.push_back(tau(t, k));
  return krylov_dim(dense(t.A()), gens);
}

/// Degree of the minimal polynomial of X: the first d with rank{I..X^d} = d.
inline int minpoly_degree(const Dense& x) {
  const std::size_t n = x.size();
  std::vector<std::vector<Rational>> flat;
  Dense p(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) p[i][i] = 1;
  for (std::size_t d = 0; d <= n; ++d) {
    std::vector<Rational> f;
    for (const auto& row : p) f.insert(f.end(), row.begin(), row.end());
    flat.push_back(f);
    if (rank_of(flat) == static_cast<int>(d)) return static_cast<int>(d);
    Dense next(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) next[i][j] += p[i][k] * x[k][j];
    p = next;
  }
  return static_cast<int>(n);
}

/// Evaluates a polynomial at a square matrix.
inline Dense poly_at(const wso::Polynomial<Rational>& q, const Dense& x) {
  const std::size_t n = x.size();
  Dense acc(n, std::vector<Rational>(n, Rational(0)));
  for (int d = q.degree(); d >= 0; --d) {
    Dense next(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) next[i][j] += acc[i][k] * x[k][j];
    for (std::size_t i = 0; i < n; ++i) next[i][i] += q.coeff(d);
    acc = next;
  }
  return acc;
}

/// All set partitions of {0..n-1}, blocks ordered by smallest element.
inline std::vector<std::vector<std::vector<int>>> set_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::vector<int>> cur;
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (std::size_t j = 0; j < cur.size(); ++j) {  // by index: rec may reallocate cur
      cur[j].push_back(i);
      rec(i + 1);
      cur[j].pop_back();
    }
    cur.push_back({i});
    rec(i + 1);
    cur.pop_back();
  };
  rec(0);
  return out;
}

/// Row-sum condition checked directly for every pair of blocks.
inline bool valid_equivalence(const Dense& a, const std::vector<std::vector<int>>& parts) {
  for (const auto& bl : parts)
    for (const auto& target : parts) {
      auto rowsum = [&](int i) {
        Rational s(0);
        for (int k : target) s += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        return s;
      };
      for (int i : bl)
        if (rowsum(i) != rowsum(bl.front())) return false;
    }
  return true;
}

/// Fewest blocks among valid stage partitions.
inline std::size_t min_blocks(const wso::ButcherTableau<Rational>& t) {
  const Dense a = dense(t.A());
  std::size_t best = t.stages();
  for (const auto& p : set_partitions(static_cast<int>(t.stages())))
    if (valid_equivalence(a, p)) best = std::min(best, p.size());
  return best;
}

/// R(z0) = det(I - z0 A + z0 e b^T) / det(I - z0 A) by Leibniz.
inline std::optional<Rational> stability_at(const wso::ButcherTableau<Rational>& t, const Rational& z0) {
  const std::size_t s = t.stages();
  Dense m(s, std::vector<Rational>(s)), n(s, std::vector<Rational>(s));
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      m[i][j] = (i == j ? Rational(1) : Rational(0)) - z0 * t.A()(i, j);
      n[i][j] = m[i][j] + z0 * t.b()[j];
    }
  const Rational d = leibniz_det(m);
  if (d == 0) return std::nullopt;
  return leibniz_det(n) / d;
}

}  // namespace oracle
