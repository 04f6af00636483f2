#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "wso/barriers.hpp"
#include "wso/tableau_io.hpp"

namespace wso {

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct OrderSummary {
  int p_classical = 0;  // rooted trees, capped at 6
  int p_linear = 0;     // R(z) against e^z
  int q_tilde = 0;      // stage order, min(q1, q2)
  OrderValue q_wso;
  int q1 = 0;  // largest xi with B(xi)
  int q2 = 0;  // largest xi with C(xi)
};

template <ScalarType T>
OrderSummary order_summary(const ButcherTableau<T>& t, const RationalFunction<T>& r, const OrderValue& q,
                           int pmax, const Tolerances& tol = {}) {
  OrderSummary o;
  o.p_classical = classical_order(t, 6, tol);
  o.p_linear = order_vs_exp(r, pmax);
  o.q1 = quadrature_order(t, tol);
  o.q2 = stage_condition_order(t, 2 * static_cast<int>(t.stages()) + 2, tol);
  o.q_tilde = std::min(o.q1, o.q2);
  o.q_wso = q;
  return o;
}

struct AnalysisOptions {
  Tolerances tol;
  std::optional<int> kcap;
  int pmax = 12;
};

/// Full pipeline output. `failures` lists internal consistency violations
/// (disagreeing routes, violated barriers); the report is still complete.
struct AnalysisReport {
  Json json;
  std::vector<std::string> failures;
  bool consistent() const { return failures.empty(); }
};

namespace detail {

template <ScalarType T>
Json scalar_json(const T& x) {
  if constexpr (is_exact_v<T>) {
    return format_scalar(x);
  } else {
    return x;
  }
}

template <ScalarType T>
Json poly_json(const Polynomial<T>& p, const std::string& var = "x") {
  Json c = Json::array();
  for (const auto& x : p.coeffs()) c.push_back(scalar_json(x));
  return Json{{"coefficients", c}, {"display", p.to_string(var)}};
}

inline Json order_json(const OrderValue& q) {
  if (q.infinite) return "inf";
  return q.value;
}

inline Json partition_json(const std::vector<std::vector<int>>& parts) {
  Json j = Json::array();
  for (const auto& part : parts) {
    Json g = Json::array();
    for (int i : part) g.push_back(i + 1);
    j.push_back(g);
  }
  return j;
}

inline Json barrier_json(const BarrierEntry& e) {
  Json j{{"name", e.name}, {"statement", e.statement}, {"applicable", e.applicable}};
  if (!e.applicable) {
    j["not_applicable_reason"] = e.not_applicable_reason;
    return j;
  }
  if (e.lhs) j["lhs"] = *e.lhs;
  if (e.rhs) j["rhs"] = *e.rhs;
  j["satisfied"] = e.satisfied;
  j["sharp"] = e.sharp;
  if (!e.detail.empty()) j["detail"] = e.detail;
  return j;
}

}  // namespace detail

inline Json tolerances_json(const Tolerances& tol, const AnalysisOptions& opt) {
  return Json{{"zero", tol.zero},       {"rank", tol.rank},       {"distinct", tol.distinct},
              {"trim", tol.trim},       {"divides", tol.divides}, {"factor", tol.factor},
              {"kcap", opt.kcap ? Json(*opt.kcap) : Json("auto")}, {"pmax", opt.pmax}};
}

inline Json classification_json(const SchemeClassification& c) {
  Json j{{"explicit", c.is_explicit},
         {"dirk", c.is_dirk},
         {"sdirk", c.is_sdirk},
         {"edirk", c.is_edirk},
         {"gedirk", c.is_gedirk},
         {"stiffly_accurate", c.is_stiffly_accurate},
         {"a_invertible", c.a_invertible},
         {"n_c", c.n_c}};
  j["s_reducible_partition"] = c.s_reducible_partition ? detail::partition_json(*c.s_reducible_partition) : Json();
  Json dj = Json::array();
  for (int i : c.dj_reducible_stages) dj.push_back(i + 1);
  j["dj_reducible_stages"] = dj;
  return j;
}

template <ScalarType T>
Json barrier_report_json(const BarrierReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) entries.push_back(detail::barrier_json(e));
  return Json{{"all_satisfied", r.all_satisfied()}, {"entries", entries}};
}

/// Runs classify, orders, subspaces, P/Q/N, both stability routes and the
/// barrier checks. `file_bytes` is hashed; pass the serialized tableau when
/// there is no file.
template <ScalarType T>
AnalysisReport analyze(const ButcherTableau<T>& t, const std::string& file_bytes, const AnalysisOptions& opt = {}) {
  const Tolerances& tol = opt.tol;
  const char* backend = is_exact_v<T> ? "exact" : "float";
  AnalysisReport rep;
  auto fail = [&](std::string m) { rep.failures.push_back(std::move(m)); };
  Json& j = rep.json;
  j["scheme"] = Json{{"name", t.name()},
                     {"source", t.source()},
                     {"hash", "fnv1a64:" + hex64(fnv1a64(file_bytes))},
                     {"backend", backend},
                     {"stages", t.stages()}};
  j["tolerances"] = tolerances_json(tol, opt);

  const auto cls = classify(t, tol);
  j["classification"] = classification_json(cls);

  // weak stage order by three routes
  const OrderValue q = weak_stage_order(t, opt.kcap, tol);
  const auto orth = verify_wso_orthogonality(t, tol);
  const OrderValue q_wt = weak_stage_order_wtilde(t, tol);
  if (!(orth.q_definition == q)) fail("weak stage order depends on kcap");
  if (!orth.agree()) fail("weak stage order: definition " + q.str() + " vs subspace " + orth.q_subspace.str());
  if (!(q_wt == q)) fail("weak stage order: definition " + q.str() + " vs W~ route " + q_wt.str());
  if (!orth.dimension_bound) fail("dim Y + dim K_q exceeds s");

  const auto R = stability_function(t, tol);
  const OrderSummary os = order_summary(t, R, q, opt.pmax, tol);
  j["orders"] = Json{{"p_classical", os.p_classical},
                     {"p_linear", os.p_linear},
                     {"q_tilde", os.q_tilde},
                     {"q_wso", detail::order_json(q)},
                     {"q1", os.q1},
                     {"q2", os.q2},
                     {"q_wso_subspace", detail::order_json(orth.q_subspace)},
                     {"q_wso_wtilde", detail::order_json(q_wt)}};
  if (os.p_classical > os.p_linear) fail("classical order exceeds the order of R(z)");
  if (!q.at_least(os.q_tilde)) fail("stage order exceeds weak stage order");

  const int dim_y = orth.dim_Y;
  j["dims"] = Json{{"Y", dim_y}, {"K_q", orth.dim_K}, {"saturation_index", saturation_index(t, tol)}};

  std::optional<Factorization<T>> fac;
  try {
    fac = factorization(t, q, tol);
    j["polynomials"] = Json{{"backend", backend},
                            {"P", detail::poly_json(fac->P)},
                            {"Q", detail::poly_json(fac->Q)},
                            {"N", detail::poly_json(fac->N)},
                            {"char_A", detail::poly_json(fac->char_A)}};
  } catch (const ConsistencyError& e) {
    fail(std::string("factorization: ") + e.what());
    j["polynomials"] = Json();
  }

  Json st{{"backend", backend},
          {"numerator", detail::poly_json(R.numerator(), "z")["coefficients"]},
          {"denominator", detail::poly_json(R.denominator(), "z")["coefficients"]},
          {"display", "(" + R.numerator().to_string("z") + ") / (" + R.denominator().to_string("z") + ")"},
          {"order_vs_exp", os.p_linear}};
  Json alpha_route{{"applicable", fac.has_value() && os.p_linear >= dim_y}};
  if (fac && os.p_linear >= dim_y) {
    const auto alpha = expand_Q_in_basis(fac->Q);
    Json ja = Json::array();
    for (const auto& a : alpha) ja.push_back(detail::scalar_json(a));
    alpha_route["alpha"] = ja;
    const bool lemma = check_orthogonality_lemma(alpha, os.p_linear, tol);
    alpha_route["orthogonality_conditions"] = lemma;
    if (!lemma) fail("Q expansion violates alpha_j = 0 for j <= p - deg Q - 1");
    const auto R2 = stability_from_alpha(alpha, os.p_linear);
    const bool agree = R.equals(R2, is_exact_v<T> ? 0.0 : 1e-8);
    alpha_route["agrees"] = agree;
    if (!agree) fail("stability function routes disagree");
  } else {
    alpha_route["reason"] = fac ? "p < dim Y" : "factorization failed";
  }
  st["alpha_route"] = alpha_route;
  j["stability"] = st;

  const auto alb = check_albrecht(t, os.p_classical, tol);
  j["albrecht"] = Json{{"p", os.p_classical}, {"ok", alb.ok}};
  if (!alb.ok)
    fail("b^T A^j tau^(k) != 0 at (j, k) = (" + std::to_string(alb.violation->first) + ", " +
         std::to_string(alb.violation->second) + ") below the classical order");

  try {
    const auto br = check_barriers(t, tol);
    j["barriers"] = barrier_report_json<T>(br);
    for (const auto* v : br.violations()) fail("barrier violated: " + v->name);
  } catch (const ConsistencyError& e) {
    fail(std::string("barriers: ") + e.what());
    j["barriers"] = Json();
  }

  Json warn = Json::array();
  if constexpr (!is_exact_v<T>)
    warn.push_back("float backend: zero tests use tol.zero = " + format_scalar(tol.zero) +
                   " scaled by operand magnitude, rank decisions tol.rank = " + format_scalar(tol.rank));
  if (cls.s_reducible_partition) warn.push_back("scheme is S-reducible; orders refer to the scheme as given");
  if (!cls.dj_reducible_stages.empty()) warn.push_back("scheme is DJ-reducible; some stages do not affect the output");
  if (q.infinite) warn.push_back("weak stage order is infinite (Y orthogonal to every K_m)");
  j["warnings"] = warn;
  Json jf = Json::array();
  for (const auto& f : rep.failures) jf.push_back(f);
  j["consistency"] = Json{{"ok", rep.failures.empty()}, {"failures", jf}};
  return rep;
}

inline AnalysisReport analyze(const AnyTableau& t, const std::string& file_bytes, const AnalysisOptions& opt = {}) {
  return std::visit([&](const auto& x) { return analyze(x, file_bytes, opt); }, t);
}

}  // namespace wso
