#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wso/matrix.hpp"

namespace wso {

enum class SubspaceKind { generic, K, Y };

inline const char* to_string(SubspaceKind k) {
  switch (k) {
    case SubspaceKind::K: return "K";
    case SubspaceKind::Y: return "Y";
    default: return "generic";
  }
}

/// Rank-revealed basis of a subspace of T^n.
///
/// Exact backend: columns are pairwise orthogonal (not normalised), produced by
/// exact Gram-Schmidt, so membership and rank decisions are exact.
/// Float backend: columns are orthonormal, produced by column-pivoted modified
/// Gram-Schmidt with re-orthogonalisation; a generator is dependent when its
/// residual norm is at most `tol.rank * max(1, largest generator norm)`.
template <ScalarType T>
class SubspaceBasis {
 public:
  SubspaceBasis() = default;
  explicit SubspaceBasis(std::size_t ambient, SubspaceKind kind = SubspaceKind::generic, int m = 0)
      : ambient_(ambient), kind_(kind), m_(m) {}

  static SubspaceBasis span(const std::vector<Vector<T>>& generators, std::size_t ambient,
                            const Tolerances& tol = {}, SubspaceKind kind = SubspaceKind::generic,
                            int m = 0) {
    SubspaceBasis b(ambient, kind, m);
    b.tol_ = tol;
    if constexpr (is_exact_v<T>) {
      for (const auto& g : generators) b.try_add(g);
    } else {
      double gen_scale = 0.0;
      for (const auto& g : generators) gen_scale = std::max(gen_scale, std::sqrt(dot(g, g)));
      std::vector<Vector<T>> work = generators;
      const double cutoff = tol.rank * std::max(1.0, gen_scale);
      while (!work.empty()) {
        std::size_t best = 0;
        double best_norm = -1.0;
        for (std::size_t i = 0; i < work.size(); ++i) {
          const double nrm = std::sqrt(dot(work[i], work[i]));
          if (nrm > best_norm) {
            best_norm = nrm;
            best = i;
          }
        }
        if (best_norm <= cutoff || b.dim() == ambient) break;
        Vector<T> q = b.residual(work[best]);
        const double qn = std::sqrt(dot(q, q));
        if (qn <= cutoff) break;
        q = (1.0 / qn) * q;
        b.cols_.push_back(q);
        work.erase(work.begin() + static_cast<std::ptrdiff_t>(best));
        for (auto& w : work) w = w - dot(q, w) * q;
      }
    }
    return b;
  }

  std::size_t dim() const { return cols_.size(); }
  std::size_t ambient() const { return ambient_; }
  SubspaceKind kind() const { return kind_; }
  int generating_index() const { return m_; }
  const std::vector<Vector<T>>& columns() const { return cols_; }
  const Tolerances& tolerances() const { return tol_; }

  Matrix<T> basis_matrix() const { return Matrix<T>::from_columns(cols_, ambient_); }

  /// v minus its orthogonal projection onto the subspace.
  Vector<T> residual(Vector<T> v) const {
    const int passes = is_exact_v<T> ? 1 : 2;
    for (int pass = 0; pass < passes; ++pass) {
      for (const auto& u : cols_) {
        if constexpr (is_exact_v<T>) {
          const T c = dot(u, v) / dot(u, u);
          if (c != 0) v = v - c * u;
        } else {
          v = v - dot(u, v) * u;
        }
      }
    }
    return v;
  }

  bool contains(const Vector<T>& v) const {
    const Vector<T> r = residual(v);
    if constexpr (is_exact_v<T>) {
      return std::all_of(r.begin(), r.end(), [](const T& x) { return x == 0; });
    } else {
      return std::sqrt(dot(r, r)) <= tol_.rank * std::max(1.0, std::sqrt(dot(v, v)));
    }
  }

  bool contains(const SubspaceBasis& other) const {
    return std::all_of(other.cols_.begin(), other.cols_.end(), [&](const auto& c) { return contains(c); });
  }

  bool same_span(const SubspaceBasis& other) const {
    return dim() == other.dim() && contains(other);
  }

  bool orthogonal_to(const SubspaceBasis& other) const {
    for (const auto& u : cols_)
      for (const auto& w : other.cols_) {
        if constexpr (is_exact_v<T>) {
          if (dot(u, w) != 0) return false;
        } else {
          if (std::abs(dot(u, w)) > tol_.rank) return false;
        }
      }
    return true;
  }

  /// True iff a * u lies in the subspace for every basis column u.
  bool invariant_under(const Matrix<T>& a) const {
    return std::all_of(cols_.begin(), cols_.end(), [&](const auto& u) {
      const Vector<T> au = a * u;
      const Vector<T> r = residual(au);
      if constexpr (is_exact_v<T>) {
        return std::all_of(r.begin(), r.end(), [](const T& x) { return x == 0; });
      } else {
        return std::sqrt(dot(r, r)) <= tol_.rank * std::max(1.0, a.max_abs());
      }
    });
  }

  /// The d x d matrix X with a * U = U * X (requires invariance).
  Matrix<T> restriction(const Matrix<T>& a) const {
    const std::size_t d = dim();
    Matrix<T> x(d, d);
    for (std::size_t j = 0; j < d; ++j) {
      const Vector<T> au = a * cols_[j];
      for (std::size_t i = 0; i < d; ++i) {
        if constexpr (is_exact_v<T>) {
          x(i, j) = dot(cols_[i], au) / dot(cols_[i], cols_[i]);
        } else {
          x(i, j) = dot(cols_[i], au);
        }
      }
    }
    return x;
  }

  /// Sine of the largest principal angle between the two subspaces (1 when
  /// the dimensions differ), evaluated in binary64.
  double max_angle_sine(const SubspaceBasis& other) const {
    if (dim() != other.dim()) return 1.0;
    if (dim() == 0) return 0.0;
    const Eigen::MatrixXd u = orthonormal_double();
    const Eigen::MatrixXd w = other.orthonormal_double();
    const Eigen::MatrixXd r = w - u * (u.transpose() * w);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
    return std::min(1.0, svd.singularValues()(0));
  }

 private:
  void try_add(const Vector<T>& g) {
    if (dim() == ambient_) return;
    Vector<T> r = residual(g);
    if (std::all_of(r.begin(), r.end(), [](const T& x) { return x == 0; })) return;
    cols_.push_back(std::move(r));
  }

  Eigen::MatrixXd orthonormal_double() const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(ambient_), static_cast<Eigen::Index>(dim()));
    for (std::size_t j = 0; j < dim(); ++j)
      for (std::size_t i = 0; i < ambient_; ++i)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(cols_[j][i]);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  }

  std::size_t ambient_ = 0;
  SubspaceKind kind_ = SubspaceKind::generic;
  int m_ = 0;
  Tolerances tol_{};
  std::vector<Vector<T>> cols_;
};

}  // namespace wso
