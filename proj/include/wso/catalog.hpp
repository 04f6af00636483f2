#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "wso/construct.hpp"
#include "wso/tableau_io.hpp"

namespace wso {

struct CatalogEntry {
  std::string name;
  std::string description;
  std::function<AnyTableau()> build;
};

namespace detail {

inline ButcherTableau<Rational> exact_scheme(const std::string& name,
                                             std::initializer_list<std::initializer_list<const char*>> a,
                                             std::initializer_list<const char*> b) {
  std::vector<std::vector<Rational>> rows;
  for (const auto& r : a) {
    std::vector<Rational> row;
    for (const char* x : r) row.push_back(parse_rational(x));
    rows.push_back(row);
  }
  Vector<Rational> bv;
  for (const char* x : b) bv.push_back(parse_rational(x));
  return ButcherTableau<Rational>(Matrix<Rational>::from_rows(rows), bv, name, "catalog");
}

inline ButcherTableau<double> float_scheme(const std::string& name, std::vector<std::vector<double>> a,
                                           Vector<double> b) {
  return ButcherTableau<double>(Matrix<double>::from_rows(a), std::move(b), name, "catalog");
}

inline CatalogEntry sample_wso3_p3_s3(double a, Sign sign, const std::string& tag) {
  const std::string name = "wso3-p3-s3-a" + tag + "-" + to_string(sign);
  return {name, "three-stage DIRK, (s,p,q) = (3,3,3), a = " + tag + ", " + to_string(sign) + " sign",
          [=] {
            auto r = build_wso3_p3_s3(a, sign);
            return AnyTableau(ButcherTableau<double>(r.tableau.A(), r.tableau.b(), name, "catalog")
                                  .with_metadata(r.tableau.metadata()));
          }};
}

}  // namespace detail

/// Built-in schemes, in listing order.
inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    using detail::exact_scheme;
    using detail::float_scheme;
    const double r2 = std::sqrt(2.0);
    const double r3 = std::sqrt(3.0);
    std::vector<CatalogEntry> v{
        {"backward-euler", "implicit Euler, p = 1",
         [] { return AnyTableau(exact_scheme("backward-euler", {{"1"}}, {"1"})); }},
        {"explicit-euler", "forward Euler, p = 1",
         [] { return AnyTableau(exact_scheme("explicit-euler", {{"0"}}, {"1"})); }},
        {"implicit-midpoint", "one-stage Gauss, p = 2",
         [] { return AnyTableau(exact_scheme("implicit-midpoint", {{"1/2"}}, {"1"})); }},
        {"trapezoidal", "trapezoidal rule as a two-stage EDIRK, p = 2",
         [] { return AnyTableau(exact_scheme("trapezoidal", {{"0", "0"}, {"1/2", "1/2"}}, {"1/2", "1/2"})); }},
        {"radau-iia-2", "two-stage Radau IIA, p = 3",
         [] {
           return AnyTableau(exact_scheme("radau-iia-2", {{"5/12", "-1/12"}, {"3/4", "1/4"}}, {"3/4", "1/4"}));
         }},
        {"lobatto-iiic-2", "two-stage Lobatto IIIC, p = 2",
         [] {
           return AnyTableau(exact_scheme("lobatto-iiic-2", {{"1/2", "-1/2"}, {"1/2", "1/2"}}, {"1/2", "1/2"}));
         }},
        {"rk4", "classical explicit four-stage scheme, p = 4",
         [] {
           return AnyTableau(exact_scheme(
               "rk4", {{"0", "0", "0", "0"}, {"1/2", "0", "0", "0"}, {"0", "1/2", "0", "0"}, {"0", "0", "1", "0"}},
               {"1/6", "1/3", "1/3", "1/6"}));
         }},
        {"gauss2", "two-stage Gauss, p = 4",
         [=] {
           return AnyTableau(float_scheme("gauss2", {{0.25, 0.25 - r3 / 6.0}, {0.25 + r3 / 6.0, 0.25}}, {0.5, 0.5}));
         }},
        {"sdirk2-wso1", "stiffly accurate two-stage SDIRK, p = 2, weak stage order 1 (comparison scheme)",
         [=] {
           const double g = 1.0 - r2 / 2.0;
           return AnyTableau(float_scheme("sdirk2-wso1", {{g, 0.0}, {1.0 - g, g}}, {1.0 - g, g}));
         }},
        {"trbdf2", "TR-BDF2 as a three-stage ESDIRK, p = 2",
         [=] {
           const double g = 2.0 - r2;
           const double w = r2 / 4.0;
           const double d = 1.0 - r2 / 2.0;
           return AnyTableau(float_scheme("trbdf2", {{0.0, 0.0, 0.0}, {g / 2.0, g / 2.0, 0.0}, {w, w, d}}, {w, w, d}));
         }},
        {"wso3-p2-s2-minus", "two-stage DIRK, (s,p,q) = (2,2,3), minus sign",
         [] { return AnyTableau(build_wso3_p2_s2(Sign::minus)); }},
        {"wso3-p2-s2-plus", "two-stage DIRK, (s,p,q) = (2,2,3), plus sign",
         [] { return AnyTableau(build_wso3_p2_s2(Sign::plus)); }},
    };
    for (Sign sign : {Sign::minus, Sign::plus}) {
      v.push_back(detail::sample_wso3_p3_s3(0.25, sign, "0.25"));
      v.push_back(detail::sample_wso3_p3_s3(0.5, sign, "0.5"));
      v.push_back(detail::sample_wso3_p3_s3(2.0, sign, "2"));
    }
    return v;
  }();
  return entries;
}

inline const CatalogEntry* find_catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return &e;
  return nullptr;
}

inline AnyTableau catalog_scheme(const std::string& name) {
  const auto* e = find_catalog_entry(name);
  if (!e) throw ParseError("unknown catalog scheme '" + name + "'");
  return e->build();
}

/// Loads "catalog:<name>" from the catalog, anything else from disk.
inline AnyTableau resolve_tableau(const std::string& ref) {
  const std::string prefix = "catalog:";
  if (ref.rfind(prefix, 0) == 0) return catalog_scheme(ref.substr(prefix.size()));
  return load_tableau(ref);
}

}  // namespace wso
