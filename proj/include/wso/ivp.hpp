#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wso/order.hpp"

namespace wso {

using Complex = std::complex<double>;

enum class PhiKind { sin, cos, poly, exp_scaled };

/// Smooth forcing phi(t) with derivatives of every order:
/// sin, cos, poly: (1 + t)^k, exp_scaled: exp(omega t).
struct Phi {
  PhiKind kind = PhiKind::cos;
  int degree = 3;      // poly
  double omega = 1.0;  // exp_scaled

  double derivative(double t, int n) const {
    switch (kind) {
      case PhiKind::sin: return std::sin(t + n * M_PI / 2.0);
      case PhiKind::cos: return std::cos(t + n * M_PI / 2.0);
      case PhiKind::poly: {
        if (n > degree) return 0.0;
        double f = 1.0;
        for (int i = 0; i < n; ++i) f *= degree - i;
        return f * std::pow(1.0 + t, degree - n);
      }
      case PhiKind::exp_scaled: return std::pow(omega, n) * std::exp(omega * t);
    }
    return 0.0;
  }
  double operator()(double t) const { return derivative(t, 0); }
};

/// Parses "sin", "cos", "poly", "poly:K", "exp", "exp:OMEGA".
inline Phi parse_phi(const std::string& s) {
  Phi p;
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  try {
    if (head == "sin") p.kind = PhiKind::sin;
    else if (head == "cos") p.kind = PhiKind::cos;
    else if (head == "poly") {
      p.kind = PhiKind::poly;
      if (!arg.empty()) p.degree = std::stoi(arg);
    } else if (head == "exp" || head == "exp_scaled") {
      p.kind = PhiKind::exp_scaled;
      if (!arg.empty()) p.omega = std::stod(arg);
    } else {
      throw ParseError("");
    }
  } catch (...) {
    throw ParseError("unknown phi '" + s + "' (sin, cos, poly[:k], exp[:omega])");
  }
  return p;
}

inline std::string to_string(const Phi& p) {
  switch (p.kind) {
    case PhiKind::sin: return "sin";
    case PhiKind::cos: return "cos";
    case PhiKind::poly: return "poly:" + std::to_string(p.degree);
    case PhiKind::exp_scaled: return "exp:" + format_scalar(p.omega);
  }
  return "?";
}

/// u' = lambda (u - phi(t)) + phi'(t), u(0) = phi(0), exact solution phi.
struct PRProblem {
  Complex lambda{-1.0, 0.0};
  Phi phi;

  Complex rhs(double t, Complex u) const { return lambda * (u - phi(t)) + phi.derivative(t, 1); }
};

/// One step. The right-hand side is affine in u, so the stages are solved
/// exactly: sequential scalar solves for DIRKs, one complex s x s solve otherwise.
inline Complex rk_step(const ButcherTableau<double>& t, const PRProblem& prob, double tn, Complex un, double dt) {
  const std::size_t s = t.stages();
  const auto& a = t.A();
  const Complex z = prob.lambda * dt;
  std::vector<double> ph(s), dph(s);
  for (std::size_t i = 0; i < s; ++i) {
    ph[i] = prob.phi(tn + t.c()[i] * dt);
    dph[i] = prob.phi.derivative(tn + t.c()[i] * dt, 1);
  }
  // dt f(t_j, g_j) = z (g_j - phi_j) + dt phi'_j
  std::vector<Complex> g(s);
  if (is_lower_triangular(a, false, Tolerances{0.0})) {
    for (std::size_t i = 0; i < s; ++i) {
      Complex acc = un;
      for (std::size_t j = 0; j < i; ++j) acc += a(i, j) * (z * (g[j] - ph[j]) + dt * dph[j]);
      acc += a(i, i) * (-z * ph[i] + dt * dph[i]);
      const Complex d = 1.0 - z * a(i, i);
      if (std::abs(d) < 1e-14) throw Error("singular stage equation: dt*lambda hits 1/a_ii");
      g[i] = acc / d;
    }
  } else {
    const auto n = static_cast<Eigen::Index>(s);
    Eigen::MatrixXcd m(n, n);
    Eigen::VectorXcd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      r(i) = un;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double aij = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        m(i, j) = (i == j ? 1.0 : 0.0) - z * aij;
        r(i) += aij * (-z * ph[static_cast<std::size_t>(j)] + dt * dph[static_cast<std::size_t>(j)]);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
    if (!lu.isInvertible()) throw Error("singular stage system I - dt*lambda*A");
    const Eigen::VectorXcd sol = lu.solve(r);
    for (std::size_t i = 0; i < s; ++i) g[i] = sol(static_cast<Eigen::Index>(i));
  }
  Complex u = un;
  for (std::size_t j = 0; j < s; ++j) u += t.b()[j] * (z * (g[j] - ph[j]) + dt * dph[j]);
  return u;
}

enum class RegimeKind { classical, semi_stiff, stiff };

inline const char* to_string(RegimeKind k) {
  switch (k) {
    case RegimeKind::classical: return "classical";
    case RegimeKind::semi_stiff: return "semi-stiff";
    default: return "stiff";
  }
}

inline RegimeKind parse_regime(const std::string& s) {
  if (s == "classical") return RegimeKind::classical;
  if (s == "semi-stiff" || s == "semi_stiff") return RegimeKind::semi_stiff;
  if (s == "stiff") return RegimeKind::stiff;
  throw ParseError("regime must be classical, semi-stiff or stiff, got '" + s + "'");
}

/// classical / stiff: fixed lambda = value; semi-stiff: lambda = value / dt (value = z).
struct Regime {
  RegimeKind kind = RegimeKind::classical;
  Complex value{-1.0, 0.0};

  static Regime classical(Complex lambda = -1.0) { return {RegimeKind::classical, lambda}; }
  static Regime semi_stiff(Complex z = -10.0) { return {RegimeKind::semi_stiff, z}; }
  static Regime stiff(Complex lambda = -1e6) { return {RegimeKind::stiff, lambda}; }

  Complex lambda(double dt) const { return kind == RegimeKind::semi_stiff ? value / dt : value; }
};

struct ConvergenceResult {
  Regime regime;
  std::vector<double> steps;
  std::vector<double> errors;
  std::vector<bool> at_floor;  // excluded from the fit
  double fitted_order = 0.0;
  double T = 1.0;
};

/// Integrates phi from 0 to T with constant step dt; returns |u_N - phi(T)|.
inline double integrate_error(const ButcherTableau<double>& t, const PRProblem& prob, double dt, double T) {
  const long n = std::lround(T / dt);
  if (n < 1 || std::abs(n * dt - T) > 1e-9 * T) throw ParseError("step size must divide T");
  Complex u = prob.phi(0.0);
  for (long k = 0; k < n; ++k) u = rk_step(t, prob, k * dt, u, dt);
  return std::abs(u - prob.phi(T));
}

/// Least-squares slope of log(error) against log(dt).
inline double fit_slope(const std::vector<double>& dts, const std::vector<double>& errs) {
  const std::size_t n = dts.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(dts[i]);
    my += std::log(errs[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(dts[i]) - mx;
    sxy += dx * (std::log(errs[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

inline std::vector<double> power_of_two_steps(int from, int to) {
  std::vector<double> v;
  for (int k = from; k <= to; ++k) v.push_back(std::ldexp(1.0, -k));
  return v;
}

inline ConvergenceResult estimate_order(const ButcherTableau<double>& t, const Phi& phi, const Regime& regime,
                                        const std::vector<double>& dts, double T = 1.0) {
  if (dts.size() < 4) throw ParseError("need at least 4 step sizes");
  for (std::size_t i = 1; i < dts.size(); ++i)
    if (!(dts[i] < dts[i - 1])) throw ParseError("step sizes must be strictly decreasing");
  ConvergenceResult r;
  r.regime = regime;
  r.steps = dts;
  r.T = T;
  const double floor = 1e-13 * std::max(std::abs(phi(T)), 1e-300);
  std::vector<double> fx, fy;
  for (double dt : dts) {
    const PRProblem prob{regime.lambda(dt), phi};
    const double e = integrate_error(t, prob, dt, T);
    r.errors.push_back(e);
    const bool low = !(e > floor);
    r.at_floor.push_back(low);
    if (!low) {
      fx.push_back(dt);
      fy.push_back(e);
    }
  }
  if (fx.size() < 2) throw Error("all points at the roundoff floor; cannot fit an order");
  r.fitted_order = fit_slope(fx, fy);
  return r;
}

struct LocalErrorProbe {
  Complex measured;    // phi(t_n + dt) - u_{n+1}, starting from u_n = phi(t_n)
  Complex predicted;   // -z b^T (I - zA)^{-1} E, E = sum_{k<=K} dt^k/(k-1)! tau^(k) phi^(k)(t_n)
  Complex quadrature;  // sum_{k<=K} dt^k/(k-1)! (1/k - b^T c^{k-1}) phi^(k)(t_n)
};

/// One-step error from the exact value against its residual expansion. The
/// quadrature term is the part of the remainder that does not involve z.
inline LocalErrorProbe local_error_probe(const ButcherTableau<double>& t, const PRProblem& prob, double tn, double dt,
                                         int K) {
  LocalErrorProbe r;
  const Complex un = prob.phi(tn);
  r.measured = prob.phi(tn + dt) - rk_step(t, prob, tn, un, dt);
  const std::size_t s = t.stages();
  const Complex z = prob.lambda * dt;
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s));
  double fact = 1.0;  // (k-1)!
  Complex quad = 0.0;
  for (int k = 1; k <= K; ++k) {
    if (k > 1) fact *= (k - 1);
    const double w = std::pow(dt, k) / fact * prob.phi.derivative(tn, k);
    const Vector<double> tau = residual(t, k);
    for (std::size_t i = 0; i < s; ++i) e(static_cast<Eigen::Index>(i)) += w * tau[i];
    quad += w * (1.0 / k - dot(t.b(), pow_elementwise(t.c(), k - 1)));
  }
  const auto n = static_cast<Eigen::Index>(s);
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = (i == j ? 1.0 : 0.0) - z * t.A()(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  const Eigen::VectorXcd x = m.fullPivLu().solve(e);
  Complex btx = 0.0;
  for (std::size_t i = 0; i < s; ++i) btx += t.b()[i] * x(static_cast<Eigen::Index>(i));
  r.predicted = -z * btx;
  r.quadrature = quad;
  return r;
}

}  // namespace wso
