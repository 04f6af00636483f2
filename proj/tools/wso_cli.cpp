// wso: analyze Runge-Kutta tableaux for weak stage order.
//
// Exit codes: 0 ok, 1 input error, 2 internal consistency failure,
// 3 infeasible (or failed) construction.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wso/wso.hpp"

namespace {

enum Exit { ok = 0, input_error = 1, consistency = 2, infeasible = 3 };

struct Flags {
  double tol_rank = wso::Tolerances{}.rank;
  double tol_zero = wso::Tolerances{}.zero;
  double tol_distinct = wso::Tolerances{}.distinct;
  int kcap = 0;  // 0: automatic
  int pmax = 12;
  std::string seed_grid = "4x2";

  wso::AnalysisOptions options() const {
    wso::AnalysisOptions o;
    o.tol.rank = tol_rank;
    o.tol.zero = tol_zero;
    o.tol.distinct = tol_distinct;
    if (kcap > 0) o.kcap = kcap;
    o.pmax = pmax;
    return o;
  }
};

std::string read_bytes(const std::string& ref, const wso::AnyTableau& t) {
  if (ref.rfind("catalog:", 0) == 0) return wso::serialize_tableau(t);
  std::ifstream in(ref, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int emit(const wso::AnalysisReport& r, const wso::Json& body) {
  std::cout << body.dump(2) << "\n";
  if (!r.consistent()) {
    for (const auto& f : r.failures) std::cerr << "consistency failure: " << f << "\n";
    return consistency;
  }
  return ok;
}

wso::Complex parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (...) {
    throw wso::ParseError("expected a number or RE,IM, got '" + s + "'");
  }
}

std::string format_complex(wso::Complex z) {
  char buf[64];
  if (z.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.16e", z.real());
  } else {
    std::snprintf(buf, sizeof buf, "%.16e%+.16ej", z.real(), z.imag());
  }
  return buf;
}

/// "4:10" is 2^-4 .. 2^-10, otherwise a comma list of step sizes.
std::vector<double> parse_dts(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon != std::string::npos) return wso::power_of_two_steps(std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1)));
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
    return v;
  } catch (...) {
    throw wso::ParseError("--dts must be FROM:TO (powers of 1/2) or a comma list, got '" + s + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak stage order analysis of Runge-Kutta schemes"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags fl;
  app.add_option("--tol-rank", fl.tol_rank, "rank decisions in float mode")->capture_default_str();
  app.add_option("--tol-zero", fl.tol_zero, "scaled zero tests in float mode")->capture_default_str();
  app.add_option("--tol-distinct", fl.tol_distinct, "abscissa ties when counting n_c")->capture_default_str();
  app.add_option("--kcap", fl.kcap, "extra residual index horizon for the WSO search (0 = automatic)")
      ->capture_default_str();
  app.add_option("--pmax", fl.pmax, "highest order tested for R(z) against exp(z)")->capture_default_str();
  app.add_option("--seed-grid", fl.seed_grid, "Newton seed grid NXxNY for wso3-p3-s3")->capture_default_str();

  std::string file;
  auto* analyze = app.add_subcommand("analyze", "full report as JSON");
  analyze->add_option("file", file, "tableau file or catalog:<name>")->required();
  auto* barriers = app.add_subcommand("barriers", "barrier checks as JSON");
  barriers->add_option("file", file, "tableau file or catalog:<name>")->required();
  auto* stability = app.add_subcommand("stability", "stability function as JSON");
  stability->add_option("file", file, "tableau file or catalog:<name>")->required();

  std::string family, sign = "minus", out_path;
  double a = 0.5;
  int gs = 2, gp = 2, gq = 3;
  auto* construct = app.add_subcommand("construct", "build a tableau file");
  construct->add_option("family", family, "wso3-p2-s2, wso3-p3-s3 or generic")->required();
  construct->add_option("--a", a, "scale of the leading block (wso3-p3-s3)")->capture_default_str();
  construct->add_option("--sign", sign, "minus or plus")->capture_default_str();
  construct->add_option("--s", gs, "stages (generic)")->capture_default_str();
  construct->add_option("--p", gp, "order (generic)")->capture_default_str();
  construct->add_option("--q", gq, "weak stage order (generic)")->capture_default_str();
  construct->add_option("-o,--output", out_path, "write here instead of stdout");

  std::string regime = "semi-stiff", phi = "cos", dts = "4:10", zs = "-10", lambdas = "-1e6";
  double T = 1.0;
  auto* converge = app.add_subcommand("converge", "Prothero-Robinson convergence study as CSV");
  converge->add_option("file", file, "tableau file or catalog:<name>")->required();
  converge->add_option("--regime", regime, "classical, semi-stiff or stiff")->capture_default_str();
  converge->add_option("--z", zs, "z = dt*lambda in the semi-stiff regime (RE or RE,IM)")->capture_default_str();
  converge->add_option("--lambda", lambdas, "lambda in the classical/stiff regimes (RE or RE,IM)")
      ->capture_default_str();
  converge->add_option("--phi", phi, "sin, cos, poly[:k] or exp[:omega]")->capture_default_str();
  converge->add_option("--T", T, "final time")->capture_default_str();
  converge->add_option("--dts", dts, "FROM:TO for 2^-FROM..2^-TO, or a comma list")->capture_default_str();

  std::string show_name;
  auto* cat = app.add_subcommand("catalog", "built-in schemes");
  cat->require_subcommand(1);
  cat->add_subcommand("list", "names and descriptions");
  auto* show = cat->add_subcommand("show", "print a scheme as a tableau file");
  show->add_option("name", show_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : input_error;
  }

  try {
    if (analyze->parsed() || barriers->parsed() || stability->parsed()) {
      const auto t = wso::resolve_tableau(file);
      const auto rep = wso::analyze(t, read_bytes(file, t), fl.options());
      if (analyze->parsed()) return emit(rep, rep.json);
      wso::Json body{{"scheme", rep.json["scheme"]}, {"tolerances", rep.json["tolerances"]}};
      if (barriers->parsed()) {
        body["orders"] = rep.json["orders"];
        body["barriers"] = rep.json["barriers"];
      } else {
        body["stability"] = rep.json["stability"];
      }
      body["consistency"] = rep.json["consistency"];
      return emit(rep, body);
    }
    if (construct->parsed()) {
      std::string text;
      if (family == "wso3-p2-s2") {
        text = wso::serialize_tableau(wso::build_wso3_p2_s2(wso::parse_sign(sign)));
      } else if (family == "wso3-p3-s3") {
        const auto r = wso::build_wso3_p3_s3(a, wso::parse_sign(sign), wso::parse_seed_grid(fl.seed_grid));
        text = wso::serialize_tableau(r.tableau);
      } else if (family == "generic") {
        const auto r = wso::generic_search(wso::GenericSpec{gs, gp, gq});
        if (!r.tableau) {
          std::cerr << "construction failed: " << r.diagnostic << "\n";
          if (r.infeasible_barrier) std::cerr << "violated barrier: " << *r.infeasible_barrier << "\n";
          return infeasible;
        }
        text = wso::serialize_tableau(*r.tableau);
      } else {
        throw wso::ParseError("unknown family '" + family + "' (wso3-p2-s2, wso3-p3-s3, generic)");
      }
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw wso::ParseError("cannot write " + out_path);
        out << text;
      }
      return ok;
    }
    if (converge->parsed()) {
      const auto any = wso::resolve_tableau(file);
      const auto t = std::visit([](const auto& x) { return wso::to_float(x); }, any);
      const auto kind = wso::parse_regime(regime);
      const wso::Complex param = parse_complex(kind == wso::RegimeKind::semi_stiff ? zs : lambdas);
      if (param.real() > 0.0) throw wso::ParseError("Re(lambda) must be <= 0");
      const auto res = wso::estimate_order(t, wso::parse_phi(phi), wso::Regime{kind, param}, parse_dts(dts), T);
      std::cout << "scheme,regime,param,dt,error,fitted_order\n";
      char buf[256];
      for (std::size_t i = 0; i < res.steps.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%.16e,%.16e,%.16e\n", t.name().c_str(), wso::to_string(kind),
                      format_complex(param).c_str(), res.steps[i], res.errors[i], res.fitted_order);
        std::cout << buf;
      }
      return ok;
    }
    if (show->parsed()) {
      std::cout << wso::serialize_tableau(wso::catalog_scheme(show_name));
      return ok;
    }
    for (const auto& e : wso::catalog()) std::cout << e.name << "\t" << e.description << "\n";
    return ok;
  } catch (const wso::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\nviolated barrier: " << e.barrier() << "\n";
    return infeasible;
  } catch (const wso::ConsistencyError& e) {
    std::cerr << "consistency failure: " << e.what() << "\n";
    return consistency;
  } catch (const wso::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const wso::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return construct->parsed() ? infeasible : input_error;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return consistency;
  }
}
