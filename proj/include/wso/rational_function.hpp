#pragma once

#include <algorithm>
#include <vector>

#include "wso/polynomial.hpp"

namespace wso {

/// numerator(z) / denominator(z) with denominator(0) != 0, normalised so that
/// denominator(0) == 1. Exact backend: common factors removed by gcd.
template <ScalarType T>
class RationalFunction {
 public:
  RationalFunction() : num_(Polynomial<T>{}), den_(Polynomial<T>::one()) {}
  RationalFunction(Polynomial<T> num, Polynomial<T> den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw Error("rational function with zero denominator");
    if constexpr (is_exact_v<T>) {
      if (!num_.is_zero()) {
        const auto g = gcd(num_, den_);
        if (g.degree() > 0) {
          num_ = divide(num_, g).quotient;
          den_ = divide(den_, g).quotient;
        }
      }
    }
    const T d0 = den_.coeff(0);
    if (d0 == 0) throw Error("rational function denominator vanishes at z = 0");
    if (d0 != T(1)) {
      const T inv = T(1) / d0;
      num_ = inv * num_;
      den_ = inv * den_;
    }
  }

  const Polynomial<T>& numerator() const { return num_; }
  const Polynomial<T>& denominator() const { return den_; }

  template <class U>
  U evaluate(const U& z) const {
    return num_.evaluate(z) / den_.evaluate(z);
  }

  bool is_identically_zero() const { return num_.is_zero(); }

  /// Taylor coefficients r_0..r_n of num/den about z = 0.
  std::vector<T> series(int n) const {
    std::vector<T> r(static_cast<std::size_t>(n) + 1, T(0));
    const T d0 = den_.coeff(0);
    for (int k = 0; k <= n; ++k) {
      T acc = num_.coeff(k);
      for (int j = 1; j <= k && j <= den_.degree(); ++j) acc -= den_.coeff(j) * r[static_cast<std::size_t>(k - j)];
      r[static_cast<std::size_t>(k)] = acc / d0;
    }
    return r;
  }

  /// Cross-multiplied comparison a.num * b.den == b.num * a.den
  /// (float: coefficientwise within tol relative to max(1, largest coefficient)).
  bool equals(const RationalFunction& other, double tol = 0.0) const {
    const auto lhs = num_ * other.den_;
    const auto rhs = other.num_ * den_;
    if constexpr (is_exact_v<T>) {
      return (lhs - rhs).is_zero();
    } else {
      const double scale = std::max({1.0, lhs.max_abs_coeff(), rhs.max_abs_coeff()});
      const int n = std::max(lhs.degree(), rhs.degree());
      for (int i = 0; i <= n; ++i)
        if (std::abs(lhs.coeff(i) - rhs.coeff(i)) > tol * scale) return false;
      return true;
    }
  }

 private:
  Polynomial<T> num_;
  Polynomial<T> den_;
};

}  // namespace wso
