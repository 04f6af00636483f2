#pragma once

#include <algorithm>
#include <climits>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "wso/barriers.hpp"

namespace wso {

enum class Sign { plus, minus };

inline const char* to_string(Sign s) { return s == Sign::plus ? "plus" : "minus"; }

inline Sign parse_sign(const std::string& s) {
  if (s == "plus" || s == "+") return Sign::plus;
  if (s == "minus" || s == "-") return Sign::minus;
  throw ParseError("sign must be 'plus' or 'minus', got '" + s + "'");
}

/// Thrown when the requested targets violate a barrier; names the barrier.
class InfeasibleError : public Error {
 public:
  InfeasibleError(std::string barrier, const std::string& what) : Error(what), barrier_(std::move(barrier)) {}
  const std::string& barrier() const { return barrier_; }

 private:
  std::string barrier_;
};

// ---- nonlinear solves ---------------------------------------------------------

using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

inline Eigen::MatrixXd fd_jacobian(const VectorFn& f, const Eigen::VectorXd& x, const Eigen::VectorXd& fx) {
  Eigen::MatrixXd j(fx.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double h = 1e-7 * std::max(1.0, std::abs(x(k)));
    Eigen::VectorXd xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    j.col(k) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

struct NewtonOptions {
  int max_iter = 100;
  double target = 1e-12;  // max-abs residual
  int max_halvings = 30;
};

struct NewtonResult {
  Eigen::VectorXd x;
  double residual = INFINITY;
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton (square systems; least-squares steps otherwise), halving the
/// step until the residual decreases.
inline NewtonResult damped_newton(const VectorFn& f, Eigen::VectorXd x, const NewtonOptions& opt = {}) {
  NewtonResult r;
  Eigen::VectorXd fx = f(x);
  double res = fx.cwiseAbs().maxCoeff();
  int it = 0;
  for (; it < opt.max_iter && res > opt.target; ++it) {
    const Eigen::MatrixXd j = fd_jacobian(f, x, fx);
    const Eigen::VectorXd dx = j.completeOrthogonalDecomposition().solve(-fx);
    if (!dx.allFinite()) break;
    double lam = 1.0;
    bool improved = false;
    for (int h = 0; h < opt.max_halvings; ++h, lam *= 0.5) {
      const Eigen::VectorXd xn = x + lam * dx;
      const Eigen::VectorXd fn = f(xn);
      const double rn = fn.allFinite() ? fn.cwiseAbs().maxCoeff() : INFINITY;
      if (rn < res) {
        x = xn;
        fx = fn;
        res = rn;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  r.x = x;
  r.residual = res;
  r.iterations = it;
  r.converged = res <= opt.target;
  return r;
}

/// Newton on F(x) * prod_i (1/||x - r_i||^2 + 1), which keeps iterates away
/// from the known roots r_i.
inline NewtonResult deflated_newton(const VectorFn& f, const std::vector<Eigen::VectorXd>& known, Eigen::VectorXd x0,
                                    const NewtonOptions& opt = {}) {
  VectorFn g = [&](const Eigen::VectorXd& x) {
    double m = 1.0;
    for (const auto& r : known) m *= 1.0 / std::max((x - r).squaredNorm(), 1e-300) + 1.0;
    return Eigen::VectorXd(m * f(x));
  };
  NewtonResult d = damped_newton(g, std::move(x0), NewtonOptions{opt.max_iter, 0.0, opt.max_halvings});
  // polish on the undeflated system
  NewtonResult r = damped_newton(f, d.x, opt);
  r.iterations += d.iterations;
  return r;
}

// ---- two-stage family -----------------------------------------------------------

/// Two-stage DIRK with p = 2 and weak stage order 3: a_11 = 1 -+ sqrt2/2,
/// a_21 = 1/2 +- sqrt2/2, a_22 = 1/2, b = (1/2 +- sqrt2/4, 1/2 -+ sqrt2/4).
/// `minus` takes the upper signs (a_11 = 1 - sqrt2/2).
inline ButcherTableau<double> build_wso3_p2_s2(Sign sign) {
  const double r = (sign == Sign::minus ? 1.0 : -1.0) * std::sqrt(2.0) / 2.0;
  Matrix<double> a = Matrix<double>::from_rows({{1.0 - r, 0.0}, {0.5 + r, 0.5}});
  Vector<double> b{0.5 + r / 2.0, 0.5 - r / 2.0};
  Json meta = {{"family", "wso3-p2-s2"}, {"sign", to_string(sign)}};
  return ButcherTableau<double>(a, b, std::string("wso3-p2-s2-") + to_string(sign)).with_metadata(meta);
}

// ---- three-stage family ---------------------------------------------------------

struct Branch {
  double a31 = 0.0;
  double a32 = 0.0;
  double residual = 0.0;
  std::optional<std::vector<std::vector<int>>> partition;  // S-reducibility
  std::string structure;  // "irreducible", "row-copy", "first-column" or "other"
};

struct Wso3P3S3Result {
  ButcherTableau<double> tableau;
  std::vector<Branch> branches;
  bool positive_eigenvalues = false;  // 0 < a < 2/3 or a > 1
};

struct SeedGrid {
  int nx = 4;
  int ny = 2;
  double half_width = 3.0;
};

inline SeedGrid parse_seed_grid(const std::string& s) {
  SeedGrid g;
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) throw ParseError("");
    g.nx = std::stoi(s.substr(0, x));
    g.ny = std::stoi(s.substr(x + 1));
  } catch (...) {
    throw ParseError("seed grid must look like 4x2, got '" + s + "'");
  }
  if (g.nx < 1 || g.ny < 1) throw ParseError("seed grid dimensions must be positive");
  return g;
}

inline std::vector<Eigen::VectorXd> grid_seeds(const SeedGrid& g, double scale = 1.0) {
  std::vector<Eigen::VectorXd> seeds;
  const double w = g.half_width * scale;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      Eigen::VectorXd s(2);
      s << -w + (2.0 * i + 1.0) * w / g.nx, -w + (2.0 * j + 1.0) * w / g.ny;
      seeds.push_back(s);
    }
  return seeds;
}

namespace detail {

struct ThreeStageFrame {
  double a11, a21, a22, a33;
};

inline ThreeStageFrame three_stage_frame(double a, Sign sign) {
  const double r = (sign == Sign::minus ? 1.0 : -1.0) * std::sqrt(2.0) / 2.0;
  return {a * (1.0 - r), a * (0.5 + r), a * 0.5, (3.0 * a - 2.0) / (6.0 * (a - 1.0))};
}

inline Matrix<double> three_stage_matrix(const ThreeStageFrame& f, double a31, double a32) {
  return Matrix<double>::from_rows({{f.a11, 0.0, 0.0}, {f.a21, f.a22, 0.0}, {a31, a32, f.a33}});
}

/// Row 3 of (A - a_11 I) tau^(j), j = 2, 3.
inline Eigen::VectorXd third_row_residual(const ThreeStageFrame& f, const Eigen::VectorXd& x) {
  const Matrix<double> a = three_stage_matrix(f, x(0), x(1));
  const Vector<double> c = a * ones<double>(3);
  Eigen::VectorXd out(2);
  for (int j = 2; j <= 3; ++j) {
    const Vector<double> tau = a * pow_elementwise(c, j - 1) - (1.0 / j) * pow_elementwise(c, j);
    out(j - 2) = a(2, 0) * tau[0] + a(2, 1) * tau[1] + (a(2, 2) - f.a11) * tau[2];
  }
  return out;
}

/// With u = c_3 both third-row equations are linear in a_31,
/// alpha_j a_31 + beta_j(u) = 0, alpha_j constant; their compatibility
/// alpha_2 beta_3(u) - alpha_3 beta_2(u) = 0 is a cubic in u.
inline std::vector<Eigen::VectorXd> elimination_seeds(const ThreeStageFrame& f) {
  const double c1 = f.a11, c2 = f.a21 + f.a22, d = f.a33 - f.a11, a33 = f.a33;
  auto t1 = [&](int j) { return f.a11 * std::pow(c1, j - 1) - std::pow(c1, j) / j; };
  auto t2 = [&](int j) { return f.a21 * std::pow(c1, j - 1) + f.a22 * std::pow(c2, j - 1) - std::pow(c2, j) / j; };
  auto alpha = [&](int j) { return t1(j) - t2(j) + d * (std::pow(c1, j - 1) - std::pow(c2, j - 1)); };
  const double al2 = alpha(2), al3 = alpha(3);
  const std::vector<double> b2{-a33 * t2(2) - d * a33 * c2, t2(2) + d * c2 + d * a33, -d / 2.0, 0.0};
  const std::vector<double> b3{-a33 * t2(3) - d * a33 * c2 * c2, t2(3) + d * c2 * c2, d * a33, -d / 3.0};
  std::vector<double> g(4);
  for (std::size_t i = 0; i < 4; ++i) g[i] = al2 * b3[i] - al3 * b2[i];
  int deg = 3;
  while (deg > 0 && std::abs(g[static_cast<std::size_t>(deg)]) <= 1e-14 * std::abs(g[0]) + 1e-300) --deg;
  std::vector<Eigen::VectorXd> seeds;
  if (deg < 1) return seeds;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 0; i < deg; ++i) {
    if (i + 1 < deg) comp(i + 1, i) = 1.0;
    comp(i, deg - 1) = -g[static_cast<std::size_t>(i)] / g[static_cast<std::size_t>(deg)];
  }
  const Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  const bool use2 = std::abs(al2) >= std::abs(al3);
  for (Eigen::Index i = 0; i < deg; ++i) {
    const auto u = es.eigenvalues()(i);
    if (std::abs(u.imag()) > 1e-8 * std::max(1.0, std::abs(u))) continue;
    const double ur = u.real();
    const auto& b = use2 ? b2 : b3;
    const double beta = b[0] + ur * (b[1] + ur * (b[2] + ur * b[3]));
    Eigen::VectorXd x(2);
    x(0) = -beta / (use2 ? al2 : al3);
    x(1) = ur - a33 - x(0);
    seeds.push_back(x);
  }
  return seeds;
}

inline Vector<double> solve_weights(const Matrix<double>& a) {
  const Vector<double> c = a * ones<double>(3);
  const Vector<double> tau2 = a * c - 0.5 * pow_elementwise(c, 2);
  // rows of M^T: e, c, tau2
  const Matrix<double> mt = Matrix<double>::from_rows({ones<double>(3), c, tau2});
  const auto b = solve(mt, Vector<double>{1.0, 0.5, 0.0});
  if (!b) throw Error("wso3-p3-s3: singular system for b");
  return *b;
}

inline std::string branch_structure(const std::optional<std::vector<std::vector<int>>>& p) {
  if (!p) return "irreducible";
  const std::vector<std::vector<int>> row_copy{{0}, {1, 2}};
  const std::vector<std::vector<int>> first_col{{0, 2}, {1}};
  if (*p == row_copy) return "row-copy";
  if (*p == first_col) return "first-column";
  return "other";
}

}  // namespace detail

/// Three-stage DIRK with (s, p, q) = (3, 3, 3): leading block a times the
/// two-stage family, a_33 = (3a-2)/(6(a-1)), (a_31, a_32) from the third-row
/// equations by multi-start Newton. The S-irreducible branch is returned.
inline Wso3P3S3Result build_wso3_p3_s3(double a, Sign sign, const SeedGrid& grid = {}, const Tolerances& tol = {}) {
  if (!std::isfinite(a) || std::abs(a) < 1e-12 || std::abs(a - 1.0) < 1e-12 || std::abs(a - 2.0 / 3.0) < 1e-12)
    throw ParseError("parameter a must avoid 0, 2/3 and 1");
  const auto frame = detail::three_stage_frame(a, sign);
  const VectorFn f = [&](const Eigen::VectorXd& x) { return detail::third_row_residual(frame, x); };
  const NewtonOptions opt;
  // Roots near a double root are only good to ~sqrt(eps); classify branches
  // with a tolerance to match.
  Tolerances btol = tol;
  btol.zero = std::max(tol.zero, 1e-7);

  std::vector<Eigen::VectorXd> roots;
  auto add_root = [&](const NewtonResult& r) {
    if (!r.converged) return;
    for (const auto& k : roots)
      if ((k - r.x).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, k.cwiseAbs().maxCoeff())) return;
    roots.push_back(r.x);
  };
  auto has_irreducible = [&]() {
    for (const auto& x : roots)
      if (!s_reducibility(ButcherTableau<double>(detail::three_stage_matrix(frame, x(0), x(1)), {1.0, 0.0, 0.0}), btol))
        return true;
    return false;
  };

  for (const auto& s : grid_seeds(grid)) add_root(damped_newton(f, s, opt));
  // Branches outside the seed box: deflate the known roots, then widen the grid.
  for (double scale : {1.0, 3.0}) {
    if (roots.size() >= 3 && has_irreducible()) break;
    for (const auto& s : grid_seeds(grid, scale)) {
      if (roots.size() >= 3 && has_irreducible()) break;
      add_root(deflated_newton(f, roots, s, opt));
    }
  }

  // Near a_33 = a_22 the irreducible branch runs off to |x| ~ 1e4; the grid
  // cannot reach it, so seed from the eliminated cubic as a last resort.
  if (roots.size() < 3 || !has_irreducible())
    for (const auto& s : detail::elimination_seeds(frame)) {
      NewtonOptions big = opt;  // the equations are quadratic in the root's size
      const double size = std::max({1.0, s.cwiseAbs().maxCoeff(), std::abs(frame.a33)});
      big.target *= size * size;
      add_root(damped_newton(f, s, big));
    }

  std::vector<Branch> branches;
  for (const auto& x : roots) {
    Branch br;
    br.a31 = x(0);
    br.a32 = x(1);
    br.residual = f(x).cwiseAbs().maxCoeff();
    const ButcherTableau<double> probe(detail::three_stage_matrix(frame, x(0), x(1)), {1.0, 0.0, 0.0});
    br.partition = s_reducibility(probe, btol);
    br.structure = detail::branch_structure(br.partition);
    branches.push_back(br);
  }
  std::sort(branches.begin(), branches.end(), [](const Branch& x, const Branch& y) {
    return std::tie(x.a31, x.a32) < std::tie(y.a31, y.a32);
  });
  const Branch* pick = nullptr;
  for (const auto& br : branches)
    if (!br.partition && (!pick || br.residual < pick->residual)) pick = &br;
  if (roots.empty()) throw Error("wso3-p3-s3: Newton failed from every start");
  if (!pick) throw Error("wso3-p3-s3: every solution branch is S-reducible (bad a?)");

  // polish to the last bit: Newton steps while the residual still drops
  Eigen::VectorXd xp(2);
  xp << pick->a31, pick->a32;
  xp = damped_newton(f, xp, NewtonOptions{20, 0.0, opt.max_halvings}).x;
  const Matrix<double> mat = detail::three_stage_matrix(frame, xp(0), xp(1));
  const Vector<double> b = detail::solve_weights(mat);
  Json jb = Json::array();
  for (const auto& br : branches)
    jb.push_back({{"a31", br.a31}, {"a32", br.a32}, {"residual", br.residual}, {"structure", br.structure}});
  Json meta = {{"family", "wso3-p3-s3"},
               {"a", a},
               {"sign", to_string(sign)},
               {"newton_residual", pick->residual},
               {"branches", jb}};
  Wso3P3S3Result out{ButcherTableau<double>(mat, b, std::string("wso3-p3-s3-") + to_string(sign)).with_metadata(meta),
                     branches, (a > 0.0 && a < 2.0 / 3.0) || a > 1.0};
  return out;
}

// ---- generic search -----------------------------------------------------------

struct GenericSpec {
  int s = 2;
  int p = 2;
  int q = 3;
  std::vector<double> diagonal_seed;
  int starts = 64;
  unsigned seed = 20240917u;
};

struct SearchResult {
  std::optional<ButcherTableau<double>> tableau;
  std::string diagnostic;
  std::optional<std::string> infeasible_barrier;
  double residual = INFINITY;
  int p_classical = 0;
};

/// Throws InfeasibleError when no DIRK with these targets can exist.
inline void check_feasibility(const GenericSpec& spec) {
  if (spec.s < 1 || spec.p < 1 || spec.q < 1) throw ParseError("targets must be positive");
  // kappa in {0, 1}, sigma = 0 give the weakest form of the DIRK barrier
  int best = INT_MAX;
  for (int kappa = 0; kappa <= 1; ++kappa)
    best = std::min(best, detail::floor_half(spec.q + kappa) - kappa + spec.p);
  const int rhs = spec.s + 1;
  if (spec.q <= 2 * spec.s - 1 && best > rhs) {
    throw InfeasibleError("dirk_wso_order_barrier",
                          "infeasible targets (s, p, q) = (" + std::to_string(spec.s) + ", " + std::to_string(spec.p) +
                              ", " + std::to_string(spec.q) + "): dirk_wso_order_barrier requires floor((q+kappa)/2) - "
                              "kappa + p <= s + 1 - sigma, but the left side is at least " + std::to_string(best) +
                              " > " + std::to_string(rhs));
  }
  if (spec.q > 2 * spec.s - 1) {
    throw InfeasibleError("nonzero_abscissa_wso_bound",
                          "infeasible targets: q = " + std::to_string(spec.q) + " exceeds 2 n_c - 1 <= 2 s - 1 = " +
                              std::to_string(2 * spec.s - 1));
  }
}

/// Best-effort DIRK search: P = (x - a_11)...(x - a_rr), r = floor(q/2), and
/// least squares on P(A) tau^(k) = 0 (k <= q), b^T A^j tau^(k) = 0 and the
/// tall-tree conditions b^T A^j e = 1/(j+1)! (j < p). Returns a tableau only
/// if the analyzer confirms the targets.
inline SearchResult generic_search(const GenericSpec& spec) {
  try {
    check_feasibility(spec);
  } catch (const InfeasibleError& e) {
    SearchResult none;
    none.diagnostic = e.what();
    none.infeasible_barrier = e.barrier();
    return none;
  }
  const int s = spec.s;
  const int r = std::min(spec.q / 2, s);
  const auto ns = static_cast<std::size_t>(s);
  const int nfixed = std::min<int>(static_cast<int>(spec.diagonal_seed.size()), s);
  // unknowns: lower triangle of A (row-major) minus fixed diagonal seeds, then b
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j <= i; ++j)
      if (!(i == j && i < nfixed)) slots.emplace_back(i, j);
  const auto nA = static_cast<Eigen::Index>(slots.size());

  auto unpack = [&](const Eigen::VectorXd& x, Matrix<double>& a, Vector<double>& b) {
    a = Matrix<double>(ns, ns);
    for (int i = 0; i < nfixed; ++i) a(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = spec.diagonal_seed[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < nA; ++k)
      a(static_cast<std::size_t>(slots[static_cast<std::size_t>(k)].first), static_cast<std::size_t>(slots[static_cast<std::size_t>(k)].second)) = x(k);
    b.assign(ns, 0.0);
    for (std::size_t i = 0; i < ns; ++i) b[i] = x(nA + static_cast<Eigen::Index>(i));
  };

  const VectorFn residual = [&](const Eigen::VectorXd& x) {
    Matrix<double> a;
    Vector<double> b;
    unpack(x, a, b);
    const Vector<double> c = a * ones<double>(ns);
    std::vector<double> out;
    Matrix<double> pa = Matrix<double>::identity(ns);
    for (int i = 0; i < r; ++i) pa = pa * (a - a(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) * Matrix<double>::identity(ns));
    for (int k = 2; k <= spec.q; ++k) {
      const Vector<double> tau = a * pow_elementwise(c, k - 1) - (1.0 / k) * pow_elementwise(c, k);
      for (double v : pa * tau) out.push_back(v);
      Vector<double> v = tau;
      for (int j = 0; j < s; ++j) {
        out.push_back(dot(b, v));
        v = a * v;
      }
    }
    Vector<double> v = ones<double>(ns);
    double fact = 1.0;
    for (int j = 0; j < spec.p; ++j) {
      fact *= (j + 1);
      out.push_back(dot(b, v) - 1.0 / fact);
      v = a * v;
    }
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())));
  };

  const Eigen::Index n = nA + s;
  std::mt19937 rng(spec.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.5);
  Tolerances confirm;
  confirm.zero = 1e-9;
  confirm.rank = 1e-9;
  SearchResult best;
  best.diagnostic = "no start converged to a scheme with the requested (s, p, q)";
  for (int start = 0; start < spec.starts; ++start) {
    Eigen::VectorXd x0(n);
    for (Eigen::Index k = 0; k < n; ++k) x0(k) = dist(rng);
    const auto sol = damped_newton(residual, x0, NewtonOptions{200, 1e-13, 40});
    if (sol.residual > 1e-10 || sol.residual >= best.residual) continue;
    Matrix<double> a;
    Vector<double> b;
    unpack(sol.x, a, b);
    try {
      ButcherTableau<double> t(a, b, "generic-s" + std::to_string(s) + "-p" + std::to_string(spec.p) + "-q" +
                                         std::to_string(spec.q));
      const auto R = stability_function(t, confirm);
      const int p = order_vs_exp(R, 12, 1e-9);
      const auto q = weak_stage_order(t, std::nullopt, confirm);
      if (p < spec.p || !q.at_least(spec.q)) continue;
      const int pc = classical_order(t, 6, confirm);
      Json meta = {{"family", "generic"},
                   {"targets", {spec.s, spec.p, spec.q}},
                   {"start", start},
                   {"residual", sol.residual},
                   {"p_classical", pc}};
      best.tableau = t.with_metadata(meta);
      best.residual = sol.residual;
      best.p_classical = pc;
      best.diagnostic = "found at start " + std::to_string(start);
    } catch (const Error&) {
      continue;
    }
  }
  return best;
}

}  // namespace wso
