#include <gtest/gtest.h>

#include "wso/wso.hpp"

using namespace wso;
using R = Rational;

namespace {

ButcherTableau<double> fl(const std::string& name) {
  return std::visit([](const auto& t) { return to_float(t); }, catalog_scheme(name));
}

std::vector<double> ratio_free(const RationalFunction<double>& r) {
  // coefficients of N and D normalised so that D(0) = 1
  std::vector<double> v;
  for (int i = 0; i <= 2; ++i) v.push_back(r.numerator().coeff(i));
  for (int i = 0; i <= 2; ++i) v.push_back(r.denominator().coeff(i));
  return v;
}

double sine_between(const Vector<double>& x, const Vector<double>& y) {
  // |x - proj_y x| / |x|; the 1 - cos^2 form loses half the digits
  const double k = dot(x, y) / dot(y, y);
  return std::sqrt(dot(x - k * y, x - k * y) / dot(x, x));
}

}  // namespace

// ---- two-stage family ------------------------------------------------------------

TEST(TwoStage, EntriesAndLeftEigenvector) {
  const auto m = build_wso3_p2_s2(Sign::minus);
  EXPECT_NEAR(m.A()(0, 0), 1.0 - std::sqrt(2.0) / 2.0, 1e-16);
  for (Sign s : {Sign::minus, Sign::plus}) {
    const auto t = build_wso3_p2_s2(s);
    const Vector<double> bta = t.A().transpose() * t.b();
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(bta[i], 0.5 * t.b()[i], 1e-15);
    EXPECT_EQ(weak_stage_order(t), OrderValue::finite(3));
    EXPECT_EQ(order_vs_exp(stability_function(t)), 2);
  }
}

// ---- three-stage family --------------------------------------------------------

TEST(ThreeStage, ParameterGuards) {
  EXPECT_THROW(build_wso3_p3_s3(0.0, Sign::minus), ParseError);
  EXPECT_THROW(build_wso3_p3_s3(1.0, Sign::minus), ParseError);
  EXPECT_THROW(build_wso3_p3_s3(2.0 / 3.0, Sign::plus), ParseError);
  EXPECT_THROW(parse_seed_grid("4by2"), ParseError);
  EXPECT_THROW(parse_seed_grid("0x2"), ParseError);
  EXPECT_EQ(parse_seed_grid("5x3").nx, 5);
}

TEST(ThreeStage, SampledParameters) {
  std::vector<double> as;
  for (int i = 1; i <= 10; ++i) as.push_back(0.06 * i);        // (0, 2/3)
  for (int i = 1; i <= 10; ++i) as.push_back(1.0 + 0.19 * i);  // (1, 3)
  for (double a : as) {
    for (Sign sign : {Sign::minus, Sign::plus}) {
      const auto r = build_wso3_p3_s3(a, sign);
      const auto& t = r.tableau;
      const auto& A = t.A();
      const double g = (sign == Sign::minus ? 1.0 : -1.0) * std::sqrt(2.0) / 2.0;
      EXPECT_EQ(A(0, 0), a * (1.0 - g));
      EXPECT_EQ(A(1, 0), a * (0.5 + g));
      EXPECT_EQ(A(1, 1), a * 0.5);
      EXPECT_EQ(A(2, 2), (3.0 * a - 2.0) / (6.0 * (a - 1.0)));
      EXPECT_EQ(A(0, 1), 0.0);
      EXPECT_EQ(A(0, 2), 0.0);
      EXPECT_EQ(A(1, 2), 0.0);
      EXPECT_TRUE(r.positive_eigenvalues);

      EXPECT_EQ(classical_order(t), 3) << a;
      EXPECT_EQ(order_vs_exp(stability_function(t)), 3) << a;
      EXPECT_EQ(weak_stage_order(t), OrderValue::finite(3)) << a;
      EXPECT_LE(sine_between(residual(t, 2), residual(t, 3)), 1e-10) << a;
      EXPECT_NEAR(dot(t.b(), pow_elementwise(t.c(), 2)), 1.0 / 3.0, 1e-12);

      ASSERT_EQ(r.branches.size(), 3u) << a;
      int irreducible = 0;
      for (const auto& br : r.branches) {
        if (br.structure == "irreducible") {
          ++irreducible;
        } else {
          EXPECT_TRUE(br.structure == "row-copy" || br.structure == "first-column") << br.structure;
        }
      }
      EXPECT_EQ(irreducible, 1) << a;
    }
  }
}

TEST(ThreeStage, StabilityMatchesAlphaForm) {
  for (double a : {0.25, 0.5, 2.0}) {
    const auto r = build_wso3_p3_s3(a, Sign::minus);
    const auto ob = ortho_basis(2);
    const double x = a / 2.0;
    const double q2 = to_double(ob.polys[2].coeff(0)) + to_double(ob.polys[2].coeff(1)) * x + x * x;
    const double q1 = x - 0.5;
    const double a1 = -q2 / q1;
    const RationalFunction<double> disp(Polynomial<double>({12.0, 6.0 + 12.0 * a1, 1.0 + 6.0 * a1}),
                                        Polynomial<double>({12.0, 12.0 * a1 - 6.0, 1.0 - 6.0 * a1}));
    EXPECT_TRUE(stability_function(r.tableau).equals(disp, 1e-10)) << a;
  }
}

TEST(ThreeStage, LargeBranchNearCoincidentDiagonal) {
  // a_33 = a_22 at a = 1 + 1/sqrt3; just off it the irreducible root is ~1e6
  const auto r = build_wso3_p3_s3(1.58, Sign::plus);
  EXPECT_GT(std::abs(r.tableau.A()(2, 0)), 1e5);
  EXPECT_EQ(r.branches.size(), 3u);
  EXPECT_EQ(weak_stage_order(r.tableau), OrderValue::finite(3));
  EXPECT_EQ(order_vs_exp(stability_function(r.tableau)), 3);
}

TEST(ThreeStage, BranchesMatchEliminatedCubic) {
  for (double a : {0.1, 0.3, 0.5, 1.3, 2.0, 2.7}) {
    for (Sign sign : {Sign::minus, Sign::plus}) {
      const auto r = build_wso3_p3_s3(a, sign);
      const auto seeds = detail::elimination_seeds(detail::three_stage_frame(a, sign));
      ASSERT_EQ(seeds.size(), r.branches.size()) << a;
      for (const auto& br : r.branches) {
        double best = INFINITY;
        for (const auto& x : seeds) best = std::min(best, std::max(std::abs(x(0) - br.a31), std::abs(x(1) - br.a32)));
        EXPECT_LE(best, 1e-6) << a;
      }
    }
  }
}

TEST(ThreeStage, NegativeParameterStillBuilds) {
  const auto r = build_wso3_p3_s3(-0.5, Sign::minus);
  EXPECT_FALSE(r.positive_eigenvalues);
  EXPECT_EQ(weak_stage_order(r.tableau), OrderValue::finite(3));
}

// ---- generic search --------------------------------------------------------------

TEST(GenericSearch, RecoversTwoStageFamily) {
  const auto r = generic_search(GenericSpec{2, 2, 3});
  ASSERT_TRUE(r.tableau) << r.diagnostic;
  const auto& t = *r.tableau;
  double best = INFINITY;
  for (Sign s : {Sign::minus, Sign::plus}) {
    const auto ref = build_wso3_p2_s2(s);
    double d = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      d = std::max(d, std::abs(t.b()[i] - ref.b()[i]));
      for (std::size_t j = 0; j < 2; ++j) d = std::max(d, std::abs(t.A()(i, j) - ref.A()(i, j)));
    }
    best = std::min(best, d);
  }
  EXPECT_LE(best, 1e-8);
}

TEST(GenericSearch, Infeasible) {
  const auto r = generic_search(GenericSpec{2, 3, 3});
  EXPECT_FALSE(r.tableau);
  ASSERT_TRUE(r.infeasible_barrier);
  EXPECT_EQ(*r.infeasible_barrier, "dirk_wso_order_barrier");
  EXPECT_NE(r.diagnostic.find("dirk_wso_order_barrier"), std::string::npos);
  EXPECT_EQ(generic_search(GenericSpec{2, 1, 4}).infeasible_barrier.value_or(""), "nonzero_abscissa_wso_bound");
  EXPECT_THROW(check_feasibility(GenericSpec{0, 1, 1}), ParseError);
}

TEST(GenericSearch, ThreeStageFamily) {
  const auto r = generic_search(GenericSpec{3, 3, 3});
  ASSERT_TRUE(r.tableau) << r.diagnostic;
  const auto& t = *r.tableau;
  EXPECT_EQ(weak_stage_order(t, std::nullopt, Tolerances{1e-9, 1e-9}), OrderValue::finite(3));
  // leading 2x2 block is a multiple of a two-stage WSO-3 matrix
  const auto p = poly_P(t, OrderValue::finite(3), Tolerances{1e-9, 1e-9});
  EXPECT_EQ(p.degree(), 1);
  bool match = false;
  for (Sign s : {Sign::minus, Sign::plus}) {
    const auto ref = build_wso3_p2_s2(s);
    const double a = t.A()(1, 1) / ref.A()(1, 1);
    match = match || (std::abs(t.A()(0, 0) - a * ref.A()(0, 0)) < 1e-7 && std::abs(t.A()(1, 0) - a * ref.A()(1, 0)) < 1e-7);
  }
  EXPECT_TRUE(match);
}

// ---- Prothero-Robinson harness ------------------------------------------------------

TEST(ProtheroRobinson, HandSteps) {
  const auto be = fl("backward-euler");
  Phi one{PhiKind::poly, 0};
  // equilibrium stays put
  EXPECT_NEAR(std::abs(rk_step(fl("gauss2"), PRProblem{-3.0, one}, 0.0, 1.0, 0.3) - 1.0), 0.0, 1e-15);
  // (1 + 1)(u_1 - 1) = u_0 - 1
  EXPECT_NEAR(std::abs(rk_step(be, PRProblem{-1.0, one}, 0.0, 2.0, 1.0) - 1.5), 0.0, 1e-15);
  // lambda = 0: backward Euler is right-endpoint quadrature of phi'
  Phi sq{PhiKind::poly, 2};
  const Complex u = rk_step(be, PRProblem{0.0, sq}, 0.0, 1.0, 0.5);
  EXPECT_NEAR(u.real(), 1.0 + 0.5 * sq.derivative(0.5, 1), 1e-15);
}

TEST(ProtheroRobinson, FullyImplicitAndDirkPathsAgree) {
  // a DIRK written densely takes the sequential path; the same scheme with a
  // tiny upper entry takes the complex solve and must agree to that order
  const auto t = build_wso3_p2_s2(Sign::minus);
  Matrix<double> a = t.A();
  a(0, 1) = 1e-15;
  const ButcherTableau<double> u(a, t.b());
  const PRProblem prob{Complex(-20.0, 3.0), Phi{PhiKind::sin}};
  EXPECT_NEAR(std::abs(rk_step(t, prob, 0.1, 0.4, 0.05) - rk_step(u, prob, 0.1, 0.4, 0.05)), 0.0, 1e-13);
}

TEST(ProtheroRobinson, SingularStageSystem) {
  const auto be = fl("backward-euler");
  EXPECT_THROW(rk_step(be, PRProblem{1.0, Phi{}}, 0.0, 1.0, 1.0), Error);
  EXPECT_THROW(rk_step(fl("gauss2"), PRProblem{Complex(3.0, std::sqrt(3.0)), Phi{}}, 0.0, 1.0, 1.0), Error);
}

TEST(ProtheroRobinson, EstimateOrderErrors) {
  const auto be = fl("backward-euler");
  EXPECT_THROW(estimate_order(be, Phi{}, Regime::classical(), {0.1, 0.05, 0.025}), ParseError);
  EXPECT_THROW(estimate_order(be, Phi{}, Regime::classical(), {0.1, 0.2, 0.05, 0.025}), ParseError);
  // phi linear: backward Euler integrates it exactly, every point sits at the floor
  EXPECT_THROW(estimate_order(be, Phi{PhiKind::poly, 1}, Regime::stiff(), power_of_two_steps(4, 8)), Error);
}

TEST(ProtheroRobinson, BackwardEulerStiff) {
  const auto r = estimate_order(fl("backward-euler"), Phi{}, Regime::stiff(-1e6), power_of_two_steps(4, 10));
  EXPECT_NEAR(r.fitted_order, 1.0, 0.1);
}

TEST(ProtheroRobinson, ClassicalOrdersOnCatalog) {
  for (const auto& e : catalog()) {
    const auto t = fl(e.name);
    const int p = classical_order(t, 6, Tolerances{1e-9, 1e-9});
    const auto r = estimate_order(t, Phi{}, Regime::classical(-1.0), power_of_two_steps(4, 10));
    int used = 0;
    for (bool f : r.at_floor) used += f ? 0 : 1;
    if (used < 3) continue;  // observable cap: too few points above roundoff
    EXPECT_NEAR(r.fitted_order, p, 0.2) << e.name;
  }
}

TEST(ProtheroRobinson, SemiStiffGuaranteeOnCatalog) {
  for (const auto& e : catalog()) {
    const auto t = fl(e.name);
    const auto R = stability_function(t);
    const double rz = std::abs(R.numerator().evaluate(-10.0) / R.denominator().evaluate(-10.0));
    if (rz > 1.0) continue;  // unstable at z = -10 (explicit schemes)
    const int p = order_vs_exp(R);
    const auto q = weak_stage_order(t, std::nullopt, Tolerances{1e-9, 1e-9});
    const int target = q.infinite ? p : std::min(p, q.value + 1);
    const auto r = estimate_order(t, Phi{}, Regime::semi_stiff(-10.0), power_of_two_steps(4, 10));
    EXPECT_GE(r.fitted_order, target - 0.3) << e.name;
    if (!q.infinite && q.value < p - 1) EXPECT_LE(r.fitted_order, p - 0.5) << e.name;
  }
}

TEST(ProtheroRobinson, StiffSlopeForWsoScheme) {
  // lambda fixed and |z| >> 1: slope at least q + 1 - 0.3 until the classical term dominates
  const auto t = build_wso3_p2_s2(Sign::minus);
  const auto r = estimate_order(t, Phi{}, Regime::stiff(-1e6), power_of_two_steps(4, 10));
  EXPECT_GE(r.fitted_order, std::min(2, 3 + 1) - 0.3);
}

TEST(LocalError, BackwardEulerPredictionWithQuadrature) {
  const auto be = fl("backward-euler");
  const PRProblem prob{-1e4, Phi{PhiKind::sin}};
  const auto r = local_error_probe(be, prob, 0.3, 1e-2, 6);
  EXPECT_LE(std::abs(r.measured - (r.predicted + r.quadrature)), 0.05 * std::abs(r.measured));
}

TEST(LocalError, HalvingRatio) {
  const auto t = fl("sdirk2-wso1");
  const PRProblem prob{-1e4, Phi{PhiKind::cos}};
  std::vector<double> rem;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    const auto r = local_error_probe(t, prob, 0.2, dt, 4);
    rem.push_back(std::abs(r.measured - r.predicted));
  }
  // remainder is O(dt^{p+1}) = O(dt^3)
  EXPECT_GE(std::log2(rem[0] / rem[1]), 2.5);
  EXPECT_GE(std::log2(rem[1] / rem[2]), 2.5);
}

TEST(LocalError, HighWsoPredictsNothing) {
  const auto t = build_wso3_p2_s2(Sign::plus);
  const PRProblem prob{-1e3, Phi{PhiKind::cos}};
  const auto r = local_error_probe(t, prob, 0.1, 1e-2, 3);
  EXPECT_LE(std::abs(r.predicted), 1e-14);
  EXPECT_LE(std::abs(r.measured), 1e-5);
}

TEST(LocalError, LinearPhiIsExact) {
  const auto t = fl("sdirk2-wso1");
  const PRProblem prob{-50.0, Phi{PhiKind::poly, 1}};
  const auto r = local_error_probe(t, prob, 0.4, 0.1, 3);
  EXPECT_NEAR(std::abs(r.measured - (r.predicted + r.quadrature)), 0.0, 1e-14);
}

// ---- catalog and reports --------------------------------------------------------

TEST(Catalog, Contents) {
  for (const char* n : {"backward-euler", "implicit-midpoint", "trapezoidal", "gauss2", "sdirk2-wso1",
                        "wso3-p2-s2-minus", "wso3-p2-s2-plus", "wso3-p3-s3-a0.5-minus", "wso3-p3-s3-a2-plus"})
    EXPECT_TRUE(find_catalog_entry(n)) << n;
  EXPECT_THROW(catalog_scheme("nope"), ParseError);
  EXPECT_TRUE(std::holds_alternative<ButcherTableau<R>>(resolve_tableau("catalog:trapezoidal")));
}

TEST(Report, Fnv1a) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Report, BackwardEuler) {
  const auto t = catalog_scheme("backward-euler");
  const auto rep = analyze(t, serialize_tableau(t));
  ASSERT_TRUE(rep.consistent());
  const auto& j = rep.json;
  EXPECT_EQ(j["orders"]["q_wso"], 1);
  EXPECT_EQ(j["orders"]["p_linear"], 1);
  EXPECT_EQ(j["polynomials"]["Q"]["coefficients"], (Json{"-1", "1"}));
  EXPECT_EQ(j["scheme"]["backend"], "exact");
  EXPECT_TRUE(j["tolerances"].contains("rank"));
}

TEST(Report, TwoStageWso3) {
  const auto t = catalog_scheme("wso3-p2-s2-minus");
  const auto rep = analyze(t, serialize_tableau(t));
  ASSERT_TRUE(rep.consistent());
  EXPECT_EQ(rep.json["orders"]["q_wso"], 3);
  EXPECT_EQ(rep.json["orders"]["p_linear"], 2);
  EXPECT_TRUE(rep.json["stability"]["alpha_route"]["agrees"].get<bool>());
}

TEST(Report, WholeCatalogConsistentAndByteStable) {
  for (const auto& e : catalog()) {
    const auto t = e.build();
    const auto text = serialize_tableau(t);
    const auto a = analyze(t, text);
    const auto b = analyze(t, text);
    EXPECT_TRUE(a.consistent()) << e.name << ": " << (a.failures.empty() ? "" : a.failures.front());
    EXPECT_EQ(a.json.dump(2), b.json.dump(2)) << e.name;
  }
}

TEST(Report, StabilityRoutesAgreeOnCatalog) {
  int applicable = 0;
  for (const auto& e : catalog()) {
    const auto t = e.build();
    const auto rep = analyze(t, serialize_tableau(t));
    const auto& ar = rep.json["stability"]["alpha_route"];
    if (!ar["applicable"].get<bool>()) continue;
    ++applicable;
    EXPECT_TRUE(ar["agrees"].get<bool>()) << e.name;
  }
  EXPECT_GE(applicable, 8);
}

TEST(Report, AbsurdToleranceIsReportedNotHidden) {
  const auto t = catalog_scheme("gauss2");
  AnalysisOptions opt;
  opt.tol.rank = 1e-300;
  const auto rep = analyze(t, serialize_tableau(t), opt);
  EXPECT_FALSE(rep.consistent());
  EXPECT_FALSE(rep.json["consistency"]["ok"].get<bool>());
}
