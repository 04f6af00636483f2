#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "wso/tableau.hpp"

namespace wso {

namespace detail {

inline bool is_integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

inline const Json& require(const Json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline std::string token_of(const Json& v, const std::string& where) {
  if (!v.is_string()) throw ParseError(where + ": entries must be number strings");
  return v.get<std::string>();
}

template <ScalarType T>
T convert_token(const std::string& tok) {
  if constexpr (is_exact_v<T>) {
    return parse_rational(tok);
  } else {
    if (classify_token(tok) == TokenKind::rational) return to_double(parse_rational(tok));
    return parse_decimal(tok);
  }
}

template <ScalarType T>
ButcherTableau<T> build_tableau(const Json& j) {
  const Json& ja = require(j, "A");
  const Json& jb = require(j, "b");
  if (!ja.is_array() || ja.empty()) throw ParseError("'A' must be a non-empty array of rows");
  if (!jb.is_array()) throw ParseError("'b' must be an array");
  const std::size_t s = ja.size();
  Matrix<T> a(s, s);
  for (std::size_t i = 0; i < s; ++i) {
    if (!ja[i].is_array() || ja[i].size() != s) throw ParseError("A is not square (row " + std::to_string(i + 1) + ")");
    for (std::size_t k = 0; k < s; ++k) a(i, k) = convert_token<T>(token_of(ja[i][k], "A"));
  }
  Vector<T> b;
  for (const auto& v : jb) b.push_back(convert_token<T>(token_of(v, "b")));
  std::optional<Vector<T>> c;
  if (j.contains("c")) {
    if (!j["c"].is_array()) throw ParseError("'c' must be an array");
    c.emplace();
    for (const auto& v : j["c"]) c->push_back(convert_token<T>(token_of(v, "c")));
  }
  const std::string name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "";
  const std::string source = j.contains("source") && j["source"].is_string() ? j["source"].get<std::string>() : "";
  ButcherTableau<T> t(std::move(a), std::move(b), name, source, std::move(c));
  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) throw ParseError("'metadata' must be an object");
    t = t.with_metadata(j["metadata"]);
  }
  return t;
}

}  // namespace detail

/// Parses a tableau file. Integer tokens are valid in either backend; a file
/// holding any `p/q` token is exact, one holding any decimal token is binary64,
/// and a file with both is rejected.
inline AnyTableau parse_tableau(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("tableau file must hold a JSON object");

  bool has_fraction = false;
  bool has_decimal = false;
  auto scan = [&](const Json& v) {
    if (!v.is_string()) return;
    const auto tok = v.get<std::string>();
    if (classify_token(tok) == TokenKind::decimal) {
      has_decimal = true;
    } else if (!detail::is_integer_token(tok)) {
      has_fraction = true;
    }
  };
  for (const char* key : {"A", "b", "c"}) {
    if (!j.contains(key) || !j[key].is_array()) continue;
    for (const auto& v : j[key]) {
      if (v.is_array()) {
        for (const auto& w : v) scan(w);
      } else {
        scan(v);
      }
    }
  }
  if (has_fraction && has_decimal) throw ParseError("mixed backends: rational and decimal number strings in one file");
  if (has_decimal) return detail::build_tableau<double>(j);
  return detail::build_tableau<Rational>(j);
}

inline AnyTableau load_tableau(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open tableau file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tableau(ss.str());
}

/// Number string for a tableau file; binary64 integers keep a ".0" so the
/// backend survives a round trip.
template <ScalarType T>
std::string file_token(const T& x) {
  std::string s = format_scalar(x);
  if constexpr (!is_exact_v<T>) {
    if (detail::is_integer_token(s)) s += ".0";
  }
  return s;
}

template <ScalarType T>
Json to_json(const ButcherTableau<T>& t) {
  Json j = Json::object();
  j["name"] = t.name();
  if (!t.source().empty()) j["source"] = t.source();
  Json a = Json::array();
  for (std::size_t i = 0; i < t.stages(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < t.stages(); ++k) row.push_back(file_token(t.A()(i, k)));
    a.push_back(row);
  }
  j["A"] = a;
  Json b = Json::array(), c = Json::array();
  for (const auto& x : t.b()) b.push_back(file_token(x));
  for (const auto& x : t.c()) c.push_back(file_token(x));
  j["b"] = b;
  j["c"] = c;
  if (!t.metadata().empty()) j["metadata"] = t.metadata();
  return j;
}

template <ScalarType T>
std::string serialize_tableau(const ButcherTableau<T>& t) {
  return to_json(t).dump(2) + "\n";
}

inline std::string serialize_tableau(const AnyTableau& t) {
  return std::visit([](const auto& x) { return serialize_tableau(x); }, t);
}

}  // namespace wso
