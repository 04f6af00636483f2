#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wso/minpoly.hpp"
#include "wso/stability.hpp"

namespace wso {

/// Scheme quantities the inequalities are stated in.
struct BarrierInputs {
  int s = 0;
  int p = 0;            // order of R(z) against e^z
  int p_classical = 0;  // rooted-tree order
  OrderValue q;
  int n_c = 0;
  int sigma = 0;  // stiffly accurate and A invertible
  int kappa = 0;  // GEDIRK
  int dim_Y = 0;
  int dim_K = 0;  // dim K_q
};

struct BarrierEntry {
  std::string name;
  std::string statement;
  bool applicable = true;
  std::string not_applicable_reason;
  std::optional<long> lhs;
  std::optional<long> rhs;
  bool satisfied = true;
  bool sharp = false;
  std::string detail;
  BarrierInputs inputs;
};

struct BarrierReport {
  std::vector<BarrierEntry> entries;

  bool all_satisfied() const {
    for (const auto& e : entries)
      if (e.applicable && !e.satisfied) return false;
    return true;
  }
  std::vector<const BarrierEntry*> violations() const {
    std::vector<const BarrierEntry*> v;
    for (const auto& e : entries)
      if (e.applicable && !e.satisfied) v.push_back(&e);
    return v;
  }
  const BarrierEntry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
  void append(std::vector<BarrierEntry> more) {
    for (auto& e : more) entries.push_back(std::move(e));
  }
};

/// Everything the checkers need, computed once per scheme.
template <ScalarType T>
struct BarrierContext {
  const ButcherTableau<T>* tableau = nullptr;
  Tolerances tol;
  SchemeClassification cls;
  BarrierInputs in;
  RationalFunction<T> R;
  Polynomial<T> P;
  Polynomial<T> Q;
  SubspaceBasis<T> Y;
  SubspaceBasis<T> Kq;
  int saturation = 0;
  bool has_zero_abscissa = false;
};

template <ScalarType T>
BarrierContext<T> barrier_context(const ButcherTableau<T>& t, const Tolerances& tol = {}) {
  BarrierContext<T> ctx;
  ctx.tableau = &t;
  ctx.tol = tol;
  ctx.cls = classify(t, tol);
  ctx.R = stability_function(t, tol);
  ctx.in.s = static_cast<int>(t.stages());
  ctx.in.p = order_vs_exp(ctx.R);
  ctx.in.p_classical = classical_order(t, 6, tol);
  ctx.in.q = weak_stage_order(t, std::nullopt, tol);
  ctx.in.n_c = ctx.cls.n_c;
  ctx.in.sigma = ctx.cls.is_stiffly_accurate && ctx.cls.a_invertible ? 1 : 0;
  ctx.in.kappa = ctx.cls.is_gedirk ? 1 : 0;
  ctx.Y = space_Y(t, tol);
  ctx.Kq = space_K_at(t, ctx.in.q, tol);
  ctx.in.dim_Y = static_cast<int>(ctx.Y.dim());
  ctx.in.dim_K = static_cast<int>(ctx.Kq.dim());
  ctx.P = poly_P(t, ctx.in.q, tol);
  ctx.Q = poly_Q(t, tol);
  ctx.saturation = saturation_index(t, tol);
  ctx.has_zero_abscissa = first_zero_abscissa(t, tol).has_value();
  return ctx;
}

namespace detail {

inline int floor_half(int x) { return x >= 0 ? x / 2 : -((-x + 1) / 2); }

inline BarrierEntry inequality(std::string name, std::string statement, long lhs, long rhs, const BarrierInputs& in,
                               std::string detail = "") {
  BarrierEntry e;
  e.name = std::move(name);
  e.statement = std::move(statement);
  e.lhs = lhs;
  e.rhs = rhs;
  e.satisfied = lhs <= rhs;
  e.sharp = lhs == rhs;
  e.inputs = in;
  e.detail = std::move(detail);
  return e;
}

inline BarrierEntry predicate(std::string name, std::string statement, bool ok, const BarrierInputs& in,
                              std::string detail = "") {
  BarrierEntry e;
  e.name = std::move(name);
  e.statement = std::move(statement);
  e.satisfied = ok;
  e.inputs = in;
  e.detail = std::move(detail);
  return e;
}

inline BarrierEntry not_applicable(std::string name, std::string statement, std::string reason,
                                   const BarrierInputs& in) {
  BarrierEntry e;
  e.name = std::move(name);
  e.statement = std::move(statement);
  e.applicable = false;
  e.not_applicable_reason = std::move(reason);
  e.inputs = in;
  return e;
}

template <ScalarType T>
Polynomial<T> linear_factor(const T& root) {
  return Polynomial<T>(std::vector<T>{T(-root), T(1)}, 0.0);
}

}  // namespace detail

/// Degree bounds on R = N_r / D_r and the lower bounds on dim Y they imply.
template <ScalarType T>
std::vector<BarrierEntry> check_dimY_bounds(const BarrierContext<T>& ctx) {
  const auto& in = ctx.in;
  std::vector<BarrierEntry> out;
  const int dn = ctx.R.numerator().degree();
  const int dd = ctx.R.denominator().degree();
  out.push_back(detail::inequality("stability_degree_bound", "max(deg N_r, deg D_r) <= dim Y", std::max(dn, dd),
                                   in.dim_Y, in,
                                   "deg N_r = " + std::to_string(dn) + ", deg D_r = " + std::to_string(dd)));
  const std::string gap = "deg N_r <= deg D_r - 1";
  if (in.sigma == 1) {
    out.push_back(detail::inequality("stiff_decay_degree_gap", gap, dn, dd - 1, in));
  } else {
    out.push_back(detail::not_applicable("stiff_decay_degree_gap", gap, "not stiffly accurate with invertible A", in));
  }
  out.push_back(detail::inequality("left_space_lower_bound", "floor((p+1+sigma)/2) <= dim Y",
                                   detail::floor_half(in.p + 1 + in.sigma), in.dim_Y, in));
  const std::string dirk = "p <= dim Y + 1 - sigma";
  if (ctx.cls.is_dirk) {
    out.push_back(detail::inequality("dirk_left_space_lower_bound", dirk, in.p, in.dim_Y + 1 - in.sigma, in));
  } else {
    out.push_back(detail::not_applicable("dirk_left_space_lower_bound", dirk, "not diagonally implicit", in));
  }
  return out;
}

/// deg P <= dim K_q <= s - floor((p+1+sigma)/2), and <= s - p + 1 - sigma for DIRKs.
template <ScalarType T>
std::vector<BarrierEntry> check_dimK_bounds(const BarrierContext<T>& ctx) {
  const auto& in = ctx.in;
  std::vector<BarrierEntry> out;
  const std::string s1 = "deg P <= dim K_q";
  const std::string s2 = "dim K_q <= s - floor((p+1+sigma)/2)";
  const std::string s3 = "dim K_q <= s - p + 1 - sigma";
  out.push_back(detail::inequality("min_poly_degree_vs_residual_space", s1, ctx.P.degree(), in.dim_K, in));
  std::string why;
  if (in.q.infinite) why = "weak stage order is infinite";
  else if (in.p < 1) why = "order p < 1";
  if (!why.empty()) {
    out.push_back(detail::not_applicable("residual_space_upper_bound", s2, why, in));
    out.push_back(detail::not_applicable("dirk_residual_space_upper_bound", s3, why, in));
    return out;
  }
  const long rhs = in.s - detail::floor_half(in.p + 1 + in.sigma);
  out.push_back(detail::inequality("residual_space_upper_bound", s2, in.dim_K, rhs, in,
                                   rhs < 0 ? "negative bound: no scheme with these (s, p, sigma) exists" : ""));
  if (ctx.cls.is_dirk) {
    const long r3 = in.s - in.p + 1 - in.sigma;
    out.push_back(detail::inequality("dirk_residual_space_upper_bound", s3, in.dim_K, r3, in,
                                     r3 < 0 ? "negative bound: no scheme with these (s, p, sigma) exists" : ""));
  } else {
    out.push_back(detail::not_applicable("dirk_residual_space_upper_bound", s3, "not diagonally implicit", in));
  }
  return out;
}

/// Growth, membership and saturation properties of K_m for one generating index m.
template <ScalarType T>
std::vector<BarrierEntry> check_Km_lower_bounds(const BarrierContext<T>& ctx, int m) {
  const auto& t = *ctx.tableau;
  const auto& in = ctx.in;
  const int nc = in.n_c;
  const auto km = space_K(t, m, ctx.tol);
  const long dim = static_cast<long>(km.dim());
  const std::string tag = "(m=" + std::to_string(m) + ")";
  std::vector<BarrierEntry> out;
  if (m <= 2 * nc - 1) {
    out.push_back(detail::inequality("residual_space_growth" + tag, "max(m - n_c, 0) <= dim K_m",
                                     std::max(m - nc, 0), dim, in));
  }
  if (m == 2 * nc && !ctx.has_zero_abscissa) {
    out.push_back(detail::predicate("unit_vector_in_residual_space" + tag, "e in K_m (m = 2 n_c, all c_j != 0)",
                                    km.contains(ones<T>(t.stages())), in));
    out.push_back(detail::inequality("residual_space_full_growth" + tag, "n_c <= dim K_m", nc, dim, in));
  }
  if (m == 2 * nc - 1 && ctx.has_zero_abscissa) {
    out.push_back(detail::predicate("abscissa_vector_in_residual_space" + tag,
                                    "c in K_m (m = 2 n_c - 1, some c_j = 0)", km.contains(t.c()), in));
    out.push_back(detail::inequality("residual_space_full_growth" + tag, "n_c - 1 <= dim K_m", nc - 1, dim, in));
  }
  if (m == ctx.saturation) {
    const auto later = space_K(t, m + 3, ctx.tol);
    out.push_back(detail::predicate("residual_space_saturation" + tag, "K_m = K_{m+3} at the saturation index",
                                    km.same_span(later), in));
  }
  if (ctx.cls.is_dirk) {
    if (!ctx.cls.is_gedirk && m >= 2 * nc) {
      out.push_back(detail::inequality("dirk_residual_space_saturated_dim" + tag,
                                       "n_c <= dim K_m (DIRK, not GEDIRK, m >= 2 n_c)", nc, dim, in));
    }
    const long lb = std::min(detail::floor_half(m + in.kappa), nc) - in.kappa;
    out.push_back(detail::inequality("dirk_residual_space_lower_bound" + tag,
                                     "min(floor((m+kappa)/2), n_c) - kappa <= dim K_m", lb, dim, in));
  }
  return out;
}

/// Bounds relating q to s, p, n_c (general and DIRK).
template <ScalarType T>
std::vector<BarrierEntry> check_main_results(const BarrierContext<T>& ctx) {
  const auto& in = ctx.in;
  const int nc = in.n_c;
  std::vector<BarrierEntry> out;
  const std::string s1 = "q <= 2 n_c - 1 (all c_j != 0)";
  const std::string s2 = "q <= 2 n_c - 2, or q = inf and p = 1 (some c_j = 0)";
  if (in.p < 1) {
    out.push_back(detail::not_applicable("nonzero_abscissa_wso_bound", s1, "order p < 1", in));
    out.push_back(detail::not_applicable("zero_abscissa_wso_bound", s2, "order p < 1", in));
  } else if (!ctx.has_zero_abscissa) {
    if (in.q.infinite) {
      out.push_back(detail::predicate("nonzero_abscissa_wso_bound", s1, false, in, "q = inf"));
    } else {
      out.push_back(detail::inequality("nonzero_abscissa_wso_bound", s1, in.q.value, 2 * nc - 1, in));
    }
    out.push_back(detail::not_applicable("zero_abscissa_wso_bound", s2, "no zero abscissa", in));
  } else {
    out.push_back(detail::not_applicable("nonzero_abscissa_wso_bound", s1, "some abscissa is zero", in));
    if (in.q.infinite) {
      out.push_back(detail::predicate("zero_abscissa_wso_bound", s2, in.p == 1, in, "q = inf, p = " + std::to_string(in.p)));
    } else {
      out.push_back(detail::inequality("zero_abscissa_wso_bound", s2, in.q.value, 2 * nc - 2, in));
    }
  }

  const std::string s3 = "q + floor((p+1+sigma)/2) <= s + n_c";
  if (!in.q.infinite && in.q.value <= 2 * nc - 1) {
    out.push_back(detail::inequality("wso_order_barrier", s3, in.q.value + detail::floor_half(in.p + 1 + in.sigma),
                                     in.s + nc, in));
  } else {
    out.push_back(detail::not_applicable("wso_order_barrier", s3, "q > 2 n_c - 1", in));
  }

  const std::string s4 = "floor((q+kappa)/2) - kappa + p <= s + 1 - sigma";
  if (!ctx.cls.is_dirk) {
    out.push_back(detail::not_applicable("dirk_wso_order_barrier", s4, "not diagonally implicit", in));
  } else if (in.q.infinite || in.q.value > 2 * nc - 1) {
    out.push_back(detail::not_applicable("dirk_wso_order_barrier", s4, "q > 2 n_c - 1", in));
  } else {
    out.push_back(detail::inequality("dirk_wso_order_barrier", s4,
                                     detail::floor_half(in.q.value + in.kappa) - in.kappa + in.p,
                                     in.s + 1 - in.sigma, in));
  }
  return out;
}

/// Divisibility and root conditions on P and Q for DIRKs.
template <ScalarType T>
std::vector<BarrierEntry> check_P_necessary_conditions(const BarrierContext<T>& ctx) {
  const auto& t = *ctx.tableau;
  const auto& in = ctx.in;
  const auto& tol = ctx.tol;
  const auto& a = t.A();
  const int s = in.s;
  std::vector<BarrierEntry> out;
  const std::string s1 = "p_r | P for r <= floor(q/2) with c_1..c_r distinct";
  if (!ctx.cls.is_dirk || ctx.cls.is_gedirk) {
    out.push_back(detail::not_applicable("leading_block_divides_P", s1,
                                         ctx.cls.is_dirk ? "GEDIRK" : "not diagonally implicit", in));
  } else {
    const int rmax = std::min(s, in.q.infinite ? s : in.q.value / 2);
    int r = 0;
    bool ok = true;
    std::string detail;
    for (int k = 1; k <= rmax; ++k) {
      bool distinct = true;
      for (int i = 0; i < k - 1 && distinct; ++i)
        distinct = !same_abscissa(t.c()[static_cast<std::size_t>(i)], t.c()[static_cast<std::size_t>(k - 1)], tol);
      if (!distinct) break;
      r = k;
      const auto pr = minimal_polynomial(a.leading_block(static_cast<std::size_t>(k)), tol).poly;
      if (!divides(pr, ctx.P, tol)) {
        ok = false;
        detail = "p_" + std::to_string(k) + " = " + pr.to_string() + " does not divide P";
        break;
      }
    }
    if (r == 0) {
      out.push_back(detail::not_applicable("leading_block_divides_P", s1, "floor(q/2) < 1", in));
    } else {
      out.push_back(detail::predicate("leading_block_divides_P", s1, ok, in,
                                      ok ? "checked r = 1.." + std::to_string(r) : detail));
    }
  }

  const std::string sa = "q > 1 implies P(a_11) = 0";
  const std::string sb = "q > 3 implies (x - a_11)(x - a_22) | P";
  const std::string sc = "q > 5 implies p_3 | P";
  std::string why;
  if (!ctx.cls.is_dirk) why = "not diagonally implicit";
  else if (ctx.cls.is_gedirk) why = "GEDIRK";
  else if (s < 3) why = "fewer than 3 stages";
  else if (ctx.cls.s_reducible_partition) why = "S-reducible";
  else if (!is_invertible(a.leading_block(3), tol)) why = "leading 3x3 block singular";
  if (!why.empty()) {
    out.push_back(detail::not_applicable("P_root_a11", sa, why, in));
    out.push_back(detail::not_applicable("P_roots_a11_a22", sb, why, in));
    out.push_back(detail::not_applicable("leading_3x3_divides_P", sc, why, in));
  } else {
    const auto f1 = detail::linear_factor(a(0, 0));
    const auto f2 = f1 * detail::linear_factor(a(1, 1));
    if (in.q.at_least(2)) out.push_back(detail::predicate("P_root_a11", sa, divides(f1, ctx.P, tol), in));
    else out.push_back(detail::not_applicable("P_root_a11", sa, "q <= 1", in));
    if (in.q.at_least(4)) out.push_back(detail::predicate("P_roots_a11_a22", sb, divides(f2, ctx.P, tol), in));
    else out.push_back(detail::not_applicable("P_roots_a11_a22", sb, "q <= 3", in));
    if (in.q.at_least(6)) {
      const auto p3 = minimal_polynomial(a.leading_block(3), tol).poly;
      out.push_back(detail::predicate("leading_3x3_divides_P", sc, divides(p3, ctx.P, tol), in));
    } else {
      out.push_back(detail::not_applicable("leading_3x3_divides_P", sc, "q <= 5", in));
    }
  }

  const std::string sq = "Q(a_ss) = 0";
  const T bs = t.b()[static_cast<std::size_t>(s - 1)];
  if (!ctx.cls.is_dirk) {
    out.push_back(detail::not_applicable("Q_root_last_diagonal", sq, "not diagonally implicit", in));
  } else if (is_zero(bs, tol)) {
    out.push_back(detail::not_applicable("Q_root_last_diagonal", sq, "b_s = 0", in));
  } else {
    const auto f = detail::linear_factor(a(static_cast<std::size_t>(s - 1), static_cast<std::size_t>(s - 1)));
    out.push_back(detail::predicate("Q_root_last_diagonal", sq, divides(f, ctx.Q, tol), in));
  }
  return out;
}

/// Every checker, with K_m properties for m = 1 .. saturation index + 1.
template <ScalarType T>
BarrierReport check_barriers(const BarrierContext<T>& ctx) {
  BarrierReport r;
  r.append(check_dimY_bounds(ctx));
  r.append(check_dimK_bounds(ctx));
  for (int m = 1; m <= ctx.saturation + 1; ++m) r.append(check_Km_lower_bounds(ctx, m));
  r.append(check_main_results(ctx));
  r.append(check_P_necessary_conditions(ctx));
  return r;
}

template <ScalarType T>
BarrierReport check_barriers(const ButcherTableau<T>& t, const Tolerances& tol = {}) {
  const auto ctx = barrier_context(t, tol);
  return check_barriers(ctx);
}

}  // namespace wso
