#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <boost/multiprecision/gmp.hpp>

namespace wso {

/// Exact rational scalar, always held in lowest terms by GMP.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

enum class Backend { exact, float64 };

inline const char* to_string(Backend b) { return b == Backend::exact ? "exact" : "float64"; }

/// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input (tableau files, number strings, CLI arguments).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Two independent computations that must agree did not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Tolerances for the binary64 backend. The exact backend ignores them.
struct Tolerances {
  double zero = 1e-10;      // scalar zero tests, scaled by the operand magnitude
  double rank = 1e-9;       // column dependence in rank-revealing orthogonalisation
  double distinct = 1e-10;  // abscissa ties when counting n_c
  double trim = 1e-12;      // trailing polynomial coefficients
  double divides = 1e-9;    // polynomial divisibility, relative to the dividend
  double factor = 1e-8;     // char_A = P Q N coefficient agreement
};

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr Backend backend = Backend::exact;

  static bool is_zero(const Rational& x, double /*tol*/ = 0.0, double /*scale*/ = 1.0) {
    return x == 0;
  }
  static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
  static double to_double(const Rational& x) { return x.convert_to<double>(); }
  static std::string to_string(const Rational& x) { return x.str(); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr Backend backend = Backend::float64;

  /// |x| <= tol * max(1, scale).
  static bool is_zero(double x, double tol, double scale = 1.0) {
    return std::abs(x) <= tol * std::max(1.0, std::abs(scale));
  }
  static double abs(double x) { return std::abs(x); }
  static double to_double(double x) { return x; }
  /// Shortest representation that round-trips, at most 17 significant digits.
  static std::string to_string(double x) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
      std::snprintf(buf, sizeof buf, "%.*g", prec, x);
      if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
  }
};

template <class T>
concept ScalarType = requires { scalar_traits<T>::exact; };

template <ScalarType T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

template <ScalarType T>
bool is_zero(const T& x, const Tolerances& tol, double scale = 1.0) {
  return scalar_traits<T>::is_zero(x, tol.zero, scale);
}

template <ScalarType T>
bool nearly_equal(const T& a, const T& b, const Tolerances& tol) {
  if constexpr (is_exact_v<T>) {
    return a == b;
  } else {
    return std::abs(a - b) <= tol.zero * std::max({1.0, std::abs(a), std::abs(b)});
  }
}

template <ScalarType T>
double to_double(const T& x) {
  return scalar_traits<T>::to_double(x);
}

template <ScalarType T>
std::string format_scalar(const T& x) {
  return scalar_traits<T>::to_string(x);
}

/// Lossy conversion between backends (exact -> float, or identity).
template <ScalarType To, ScalarType From>
To scalar_cast(const From& x) {
  if constexpr (std::is_same_v<To, From>) {
    return x;
  } else if constexpr (std::is_same_v<To, double>) {
    return scalar_traits<From>::to_double(x);
  } else {
    return To(x);
  }
}

/// Kind of a number token in a tableau file.
enum class TokenKind { rational, decimal };

/// A parsed number token: either an exact rational or a binary64 value.
using ParsedNumber = std::variant<Rational, double>;

inline TokenKind classify_token(std::string_view token) {
  static const std::regex rational_re(R"(^-?[0-9]+(/[0-9]+)?$)");
  static const std::regex decimal_re(R"(^[-+]?([0-9]+\.?[0-9]*|\.[0-9]+)([eE][-+]?[0-9]+)?$)");
  const std::string s(token);
  if (std::regex_match(s, rational_re)) return TokenKind::rational;
  if (std::regex_match(s, decimal_re)) return TokenKind::decimal;
  throw ParseError("not a number string: '" + s + "'");
}

inline Rational parse_rational(std::string_view token) {
  if (classify_token(token) != TokenKind::rational) {
    throw ParseError("not a rational string: '" + std::string(token) + "'");
  }
  const auto slash = token.find('/');
  if (slash == std::string_view::npos) return Rational(BigInt(std::string(token)));
  const BigInt num(std::string(token.substr(0, slash)));
  const BigInt den(std::string(token.substr(slash + 1)));
  if (den == 0) throw ParseError("zero denominator in '" + std::string(token) + "'");
  return Rational(num, den);
}

inline double parse_decimal(std::string_view token) {
  const std::string s(token);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ParseError("not a finite decimal: '" + s + "'");
  }
  return v;
}

inline ParsedNumber parse_number(std::string_view token) {
  if (classify_token(token) == TokenKind::rational) return parse_rational(token);
  return parse_decimal(token);
}

}  // namespace wso
