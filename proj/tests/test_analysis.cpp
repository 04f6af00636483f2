#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "support/random_dirk.hpp"
#include "wso/wso.hpp"

using namespace wso;
using R = Rational;

namespace {

ButcherTableau<R> exact(const char* json) { return std::get<ButcherTableau<R>>(parse_tableau(json)); }
ButcherTableau<R> backward_euler() { return exact(R"({"A":[["1"]],"b":["1"]})"); }
ButcherTableau<R> explicit_euler() { return exact(R"({"A":[["0"]],"b":["1"]})"); }

Matrix<R> confluent_A() { return Matrix<R>::from_rows({{1, 0, 0, 0}, {1, 1, 0, 0}, {2, -1, 1, 0}, {-2, 0, 1, 2}}); }
SubspaceBasis<R> confluent_U() {
  return SubspaceBasis<R>::span({{1, 0, 0, 1}, {0, 1, 1, 0}, {1, -1, 1, -1}}, 4);
}

RationalFunction<double> pade11() {
  return RationalFunction<double>(Polynomial<double>({1.0, 0.5}), Polynomial<double>({1.0, -0.5}));
}

}  // namespace

// ---- minimal polynomials --------------------------------------------------------

TEST(MinPoly, ConfluentExample) {
  const auto a = confluent_A();
  const Polynomial<R> x1{R(-1), R(1)};
  EXPECT_EQ(min_poly_on_subspace(a, confluent_U()).poly, x1 * x1 * x1);
  const auto v = SubspaceBasis<R>::span({{1, 1, -1, -1}}, 4);
  EXPECT_EQ(min_poly_on_subspace(a.transpose(), v).poly, (Polynomial<R>{R(-2), R(1)}));
  EXPECT_EQ(min_poly_on_subspace(a, SubspaceBasis<R>(4)).poly, Polynomial<R>::one());
}

TEST(MinPoly, NonInvariantSubspaceIsRejected) {
  const auto u = SubspaceBasis<R>::span({{1, 0, 0, 0}}, 4);
  EXPECT_THROW(min_poly_on_subspace(confluent_A(), u), ConsistencyError);
}

TEST(MinPoly, HandValues) {
  EXPECT_EQ(poly_Q(backward_euler()), (Polynomial<R>{R(-1), R(1)}));
  EXPECT_EQ(poly_P(backward_euler()), Polynomial<R>::one());
  const auto f = factorization(backward_euler());
  EXPECT_EQ(f.N, Polynomial<R>::one());
  for (Sign s : {Sign::minus, Sign::plus}) {
    const auto t = build_wso3_p2_s2(s);
    const auto P = poly_P(t);
    const auto Q = poly_Q(t);
    ASSERT_EQ(P.degree(), 1);
    ASSERT_EQ(Q.degree(), 1);
    EXPECT_NEAR(-P.coeff(0), t.A()(0, 0), 1e-12);
    EXPECT_NEAR(-Q.coeff(0), 0.5, 1e-12);
    EXPECT_EQ(factorization(t).N.degree(), 0);
  }
}

TEST(MinPoly, RandomQAnnihilatesAndIsMinimal) {
  testsupport::RandomDirk gen(31);
  for (int i = 0; i < 300; ++i) {
    const auto t = gen.next();
    const auto q = poly_Q(t);
    // b^T Q(A) = 0
    const auto qa = oracle::poly_at(q, oracle::dense(t.A()));
    const auto row = oracle::mat_vec(oracle::transpose(qa), std::vector<R>(t.b().begin(), t.b().end()));
    for (const auto& x : row) EXPECT_EQ(x, R(0));
    EXPECT_EQ(q.degree(), oracle::dim_Y(t));
  }
}

TEST(MinPoly, RestrictionMatchesBruteForce) {
  testsupport::RandomDirk gen(37, 4);
  for (int i = 0; i < 200; ++i) {
    const auto t = gen.next();
    const auto q = weak_stage_order(t);
    const auto k = space_K_at(t, q);
    const auto p = min_poly_on_subspace(t.A(), k).poly;
    if (k.dim() == 0) {
      EXPECT_EQ(p, Polynomial<R>::one());
      continue;
    }
    // smallest d with a monic annihilator on K, via ranks of {U, AU, ..., A^d U}
    const auto x = oracle::dense(k.restriction(t.A()));
    EXPECT_EQ(p.degree(), oracle::minpoly_degree(x));
    const auto px = oracle::poly_at(p, x);
    for (const auto& r : px)
      for (const auto& v : r) EXPECT_EQ(v, R(0));
  }
}

TEST(MinPoly, RootsAreDiagonalEntriesAndPQDividesCharA) {
  testsupport::RandomDirk gen(41);
  for (int i = 0; i < 300; ++i) {
    const auto t = gen.next();
    const auto f = factorization(t);
    EXPECT_TRUE(divides(f.P * f.Q, f.char_A));
    EXPECT_EQ(f.P * f.Q * f.N, f.char_A);
    // DIRK: every root of P Q is a diagonal entry (multiset inclusion via divisibility)
    std::vector<R> diag;
    for (std::size_t j = 0; j < t.stages(); ++j) diag.push_back(t.A()(j, j));
    const auto all = Polynomial<R>::from_roots(diag);
    EXPECT_TRUE(divides(f.P, all));
    EXPECT_TRUE(divides(f.Q, all));
  }
}

TEST(MinPoly, FloatReportsResidual) {
  const auto t = std::get<ButcherTableau<double>>(catalog_scheme("gauss2"));
  const auto r = minimal_polynomial(t.A());
  EXPECT_EQ(r.poly.degree(), 2);
  EXPECT_LE(r.residual, 1e-9);
}

// ---- stability function -------------------------------------------------------------

TEST(Stability, HandValues) {
  const auto be = stability_function(backward_euler());
  EXPECT_TRUE(be.equals(RationalFunction<R>(Polynomial<R>::one(), Polynomial<R>{R(1), R(-1)})));
  const auto ee = stability_function(explicit_euler());
  EXPECT_TRUE(ee.equals(RationalFunction<R>(Polynomial<R>{R(1), R(1)}, Polynomial<R>::one())));
  for (Sign s : {Sign::minus, Sign::plus}) EXPECT_TRUE(stability_function(build_wso3_p2_s2(s)).equals(pade11(), 1e-12));
}

TEST(Stability, MatchesLeibnizOracle) {
  testsupport::RandomDirk gen(43);
  for (int i = 0; i < 100; ++i) {
    const auto t = gen.next();
    const auto r = stability_function(t);
    for (const R z : {R(1, 3), R(-2), R(5, 7)}) {
      const auto o = oracle::stability_at(t, z);
      if (!o) continue;
      EXPECT_EQ(r.numerator().evaluate(z) / r.denominator().evaluate(z), *o);
    }
  }
}

TEST(Stability, OrderVsExp) {
  EXPECT_EQ(order_vs_exp(pade11()), 2);
  EXPECT_EQ(order_vs_exp(stability_function(backward_euler())), 1);
  EXPECT_THROW(order_vs_exp(RationalFunction<R>(Polynomial<R>::constant(2), Polynomial<R>::one())), Error);
}

TEST(Stability, DegreeBoundsOnRandomSchemes) {
  testsupport::RandomDirk gen(47);
  for (int i = 0; i < 200; ++i) {
    const auto t = gen.next();
    const auto r = stability_function(t);
    const int dy = static_cast<int>(space_Y(t).dim());
    EXPECT_LE(r.numerator().degree(), dy);
    EXPECT_LE(r.denominator().degree(), dy);
    const auto c = classify(t);
    if (c.is_stiffly_accurate && c.a_invertible) EXPECT_LE(r.numerator().degree(), r.denominator().degree() - 1);
  }
}

TEST(Stability, FloatDeflationRemovesCommonFactors) {
  const auto t = std::get<ButcherTableau<double>>(catalog_scheme("sdirk2-wso1"));
  const auto r = stability_function(t);
  EXPECT_LE(r.denominator().degree(), 2);
  EXPECT_EQ(order_vs_exp(r), 2);
}

// ---- moments, Hankel determinants, orthogonal polynomials -------------------------

TEST(Hankel, SmallValues) {
  EXPECT_EQ(hankel_det(1, 1), R(1));
  EXPECT_EQ(hankel_det(1, 3), R(1, 6));
  EXPECT_EQ(hankel_det(2, 1), R(-1, 12));
  EXPECT_EQ(hankel_det(3, 0), hankel_det_formula(3, 0));
}

TEST(Hankel, FormulaAndJacobiAgree) {
  for (int n = 1; n <= 8; ++n)
    for (int m = 0; m <= 2; ++m) {
      EXPECT_EQ(hankel_det(n, m), hankel_det_formula(n, m)) << n << " " << m;
      EXPECT_EQ(hankel_det(n, m), hankel_det_jacobi(n, m)) << n << " " << m;
      EXPECT_EQ(hankel_det(n, m), oracle::leibniz_det(oracle::dense(hankel_matrix(n, m)))) << n << " " << m;
    }
}

TEST(OrthoBasis, Displays) {
  const auto ob = ortho_basis(3);
  EXPECT_EQ(ob.polys[0], Polynomial<R>::one());
  EXPECT_EQ(ob.polys[1], (Polynomial<R>{R(-1, 2), R(1)}));
  EXPECT_EQ(ob.polys[2], (Polynomial<R>{R(1, 12), R(-1, 2), R(1)}));
  EXPECT_EQ(ob.polys[3], (Polynomial<R>{R(-1, 120), R(1, 10), R(-1, 2), R(1)}));
  EXPECT_EQ(ortho_basis(1, MomentVariant::stiff).polys[1], (Polynomial<R>{R(-1), R(1)}));
}

TEST(OrthoBasis, Functional) {
  const auto ob = ortho_basis(8);
  EXPECT_EQ(functional_L(Polynomial<R>::one()), R(1));
  EXPECT_EQ(functional_L(ob.polys[1] * ob.polys[1]), R(-1, 12));
  EXPECT_EQ(ob.zetas[1], R(-1, 12));
  bool some_negative = false;
  for (int i = 0; i <= 8; ++i) {
    for (int j = i + 1; j <= 8; ++j) EXPECT_EQ(functional_L(ob.polys[i] * ob.polys[j]), R(0));
    const R zeta = functional_L(ob.polys[i] * ob.polys[i]);
    EXPECT_EQ(zeta, ob.zetas[i]);
    EXPECT_NE(zeta, R(0));
    EXPECT_EQ(zeta, i == 0 ? R(1) : hankel_det(i + 1, 1) / hankel_det(i, 1));
    some_negative = some_negative || zeta < 0;
  }
  EXPECT_TRUE(some_negative);
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(recurrence_lambda(n, 1), R(-1, 2));
}

TEST(OrthoBasis, StandardRecurrence) {
  const auto ob = ortho_basis(8);
  const Polynomial<R> x = Polynomial<R>::x();
  for (int n = 1; n < 8; ++n) {
    const R xi2 = R(1) / (4 * (4 * n * n - 1));
    EXPECT_EQ(ob.polys[n + 1], x * ob.polys[n] + xi2 * ob.polys[n - 1]) << n;
  }
}

TEST(OrthoBasis, ShiftedLegendreRouteAgrees) {
  const auto ob = ortho_basis(6);
  const auto lg = legendre_shifted_basis(6);
  for (int n = 0; n <= 6; ++n) EXPECT_EQ(ob.polys[n].monic(), lg[n].monic());
}

TEST(AlphaRoute, TwoStageWso3) {
  const auto t = build_wso3_p2_s2(Sign::minus);
  const auto alpha = expand_Q_in_basis(poly_Q(t));
  ASSERT_EQ(alpha.size(), 1u);
  EXPECT_NEAR(alpha[0], 0.0, 1e-12);
  EXPECT_TRUE(check_orthogonality_lemma(alpha, 2));
  EXPECT_TRUE(stability_from_alpha(alpha, 2).equals(pade11(), 1e-12));
}

TEST(AlphaRoute, DisplayedTwoDimensionalForm) {
  for (const R a1 : {R(-1, 7), R(1, 5), R(3)}) {
    const auto r = stability_from_alpha(std::vector<R>{R(0), a1}, 3);
    const RationalFunction<R> disp(Polynomial<R>{R(12), 6 + 12 * a1, 1 + 6 * a1},
                                   Polynomial<R>{R(12), 12 * a1 - 6, 1 - 6 * a1});
    EXPECT_TRUE(r.equals(disp));
  }
  EXPECT_TRUE(stability_from_alpha(std::vector<R>{}, 0).equals(RationalFunction<R>(Polynomial<R>::one(), Polynomial<R>::one())));
  EXPECT_THROW(stability_from_alpha(std::vector<R>{R(0), R(0)}, 1), Error);
}

TEST(AlphaRoute, AgreesWithDeterminantsOnRandomSchemes) {
  testsupport::RandomDirk gen(53);
  int applicable = 0;
  for (int i = 0; i < 300; ++i) {
    const auto t = gen.next();
    const auto r = stability_function(t);
    const int p = order_vs_exp(r);
    const auto q = poly_Q(t);
    if (p < q.degree()) continue;
    ++applicable;
    const auto alpha = expand_Q_in_basis(q);
    EXPECT_TRUE(check_orthogonality_lemma(alpha, p));
    EXPECT_TRUE(stability_from_alpha(alpha, p).equals(r));
  }
  EXPECT_GT(applicable, 20);
}

// ---- W functions ------------------------------------------------------------------

TEST(WTilde, HandValues) {
  const auto w2 = wtilde_k(backward_euler(), 2);
  EXPECT_TRUE(w2.equals(RationalFunction<R>(Polynomial<R>{R(0), R(1, 2)}, Polynomial<R>{R(1), R(-1)})));
  const auto t = build_wso3_p2_s2(Sign::plus);
  for (int k = 1; k <= 3; ++k) EXPECT_TRUE(wtilde_vanishes(t, k));
  EXPECT_FALSE(wtilde_vanishes(t, 4));
}

TEST(WTilde, RouteAgreesOnRandomSchemes) {
  testsupport::RandomDirk gen(59);
  for (int i = 0; i < 200; ++i) {
    const auto t = gen.next();
    EXPECT_EQ(weak_stage_order_wtilde(t), weak_stage_order(t));
  }
}

TEST(WFunction, VanishesUpToWsoAndFlagsPoles) {
  const auto t = exact(R"({"A":[["1/4","0"],["1/2","1/4"]],"b":["1/2","1/2"]})");
  EXPECT_TRUE(w_k(t, 1).numerator().is_zero());
  // b^T tau^(2) != 0 leaves a pole at z = 0
  EXPECT_THROW(w_k(backward_euler(), 2), Error);
}

// ---- barriers ---------------------------------------------------------------------

TEST(Barriers, TwoStageWso3Sharp) {
  for (Sign s : {Sign::minus, Sign::plus}) {
    const auto rep = check_barriers(build_wso3_p2_s2(s));
    EXPECT_TRUE(rep.all_satisfied());
    const auto* m = rep.find("dirk_wso_order_barrier");
    ASSERT_TRUE(m && m->applicable);
    EXPECT_EQ(*m->lhs, 3);
    EXPECT_EQ(*m->rhs, 3);
    EXPECT_TRUE(m->sharp);
    const auto* y = rep.find("left_space_lower_bound");
    ASSERT_TRUE(y);
    EXPECT_EQ(*y->lhs, 1);
    EXPECT_TRUE(y->sharp);
    EXPECT_TRUE(rep.find("unit_vector_in_residual_space(m=4)")->satisfied);
    EXPECT_TRUE(rep.find("leading_block_divides_P")->satisfied);
  }
}

TEST(Barriers, BackwardEulerLeftSpace) {
  const auto rep = check_barriers(backward_euler());
  const auto* y = rep.find("left_space_lower_bound");
  EXPECT_EQ(y->inputs.sigma, 1);
  EXPECT_EQ(*y->lhs, 1);
  EXPECT_EQ(*y->rhs, 1);
}

TEST(Barriers, ExplicitEulerInfiniteWso) {
  const auto rep = check_barriers(explicit_euler());
  EXPECT_TRUE(rep.all_satisfied());
  EXPECT_FALSE(rep.find("residual_space_upper_bound")->applicable);
  // infinite q is outside q <= 2 n_c - 1
  const auto* w = rep.find("wso_order_barrier");
  ASSERT_TRUE(w);
  EXPECT_FALSE(w->applicable);
}

TEST(Barriers, LeadingBlockCheckStopsAtRepeatedAbscissa) {
  // c = (1, 2, 2, 1): only r = 1, 2 have distinct leading abscissas
  const auto t = ButcherTableau<R>(confluent_A(), Vector<R>{1, 1, -1, -1});
  const auto rep = check_barriers(t);
  EXPECT_TRUE(rep.all_satisfied());
  const auto* e = rep.find("leading_block_divides_P");
  ASSERT_TRUE(e && e->applicable);
  EXPECT_EQ(e->detail, "checked r = 1..2");
}

TEST(Barriers, GaussSharpForWsoOrderBarrier) {
  for (const char* name : {"gauss2", "implicit-midpoint"}) {
    const auto rep =
        std::visit([](const auto& t) { return check_barriers(t); }, catalog_scheme(name));
    const auto* e = rep.find("wso_order_barrier");
    ASSERT_TRUE(e && e->applicable) << name;
    EXPECT_TRUE(e->satisfied) << name;
    EXPECT_TRUE(e->sharp) << name;
  }
}

TEST(Barriers, GedirkUsesKappa) {
  const auto t = std::get<ButcherTableau<double>>(catalog_scheme("trbdf2"));
  const auto rep = check_barriers(t);
  EXPECT_TRUE(rep.all_satisfied());
  const auto* e = rep.find("dirk_wso_order_barrier");
  ASSERT_TRUE(e);
  EXPECT_EQ(e->inputs.kappa, 1);
}

TEST(Barriers, NotApplicableCarriesReason) {
  const auto rep = check_barriers(std::get<ButcherTableau<double>>(catalog_scheme("gauss2")));
  const auto* e = rep.find("dirk_wso_order_barrier");
  ASSERT_TRUE(e);
  EXPECT_FALSE(e->applicable);
  EXPECT_FALSE(e->not_applicable_reason.empty());
}

TEST(Barriers, RandomSchemesSatisfyEveryApplicableEntry) {
  testsupport::RandomDirk gen(61);
  for (int i = 0; i < 300; ++i) {
    const auto t = gen.next();
    const auto rep = check_barriers(t);
    for (const auto* v : rep.violations())
      ADD_FAILURE() << t.name() << ": " << v->name << " " << (v->lhs ? *v->lhs : -999) << " > "
                    << (v->rhs ? *v->rhs : -999);
  }
}
