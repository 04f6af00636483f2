#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "wso/matrix.hpp"

namespace wso {

/// Unlabelled rooted tree stored as the sorted multiset of its subtrees.
struct RootedTree {
  std::vector<RootedTree> children;

  int order() const {
    int n = 1;
    for (const auto& c : children) n += c.order();
    return n;
  }

  /// gamma(t) = |t| * prod gamma(child).
  long long density() const {
    long long g = order();
    for (const auto& c : children) g *= c.density();
    return g;
  }

  /// Canonical bracket form, e.g. "[[][]]" for the cherry.
  std::string key() const {
    std::string s = "[";
    for (const auto& c : children) s += c.key();
    return s + "]";
  }

  friend bool operator<(const RootedTree& a, const RootedTree& b) { return a.key() < b.key(); }
  friend bool operator==(const RootedTree& a, const RootedTree& b) { return a.key() == b.key(); }
};

namespace detail {

inline void canonicalize(RootedTree& t) {
  for (auto& c : t.children) canonicalize(c);
  std::sort(t.children.begin(), t.children.end());
}

// Adds a leaf under `node` (a vertex inside `root`) and under every descendant.
inline void grow(RootedTree& node, std::map<std::string, RootedTree>& out, const RootedTree& root) {
  node.children.push_back(RootedTree{});
  RootedTree copy = root;
  canonicalize(copy);
  out.emplace(copy.key(), copy);
  node.children.pop_back();
  for (auto& c : node.children) grow(c, out, root);
}

}  // namespace detail

/// All rooted trees with 1..max_order vertices, grouped by order
/// (1, 1, 2, 4, 9, 20, ... trees).
inline std::vector<std::vector<RootedTree>> rooted_trees(int max_order) {
  std::vector<std::vector<RootedTree>> by_order(static_cast<std::size_t>(std::max(max_order, 0)) + 1);
  if (max_order < 1) return by_order;
  by_order[1].push_back(RootedTree{});
  for (int n = 2; n <= max_order; ++n) {
    std::map<std::string, RootedTree> next;
    for (const auto& t : by_order[static_cast<std::size_t>(n - 1)]) {
      RootedTree root = t;
      detail::grow(root, next, root);
    }
    for (auto& [k, t] : next) by_order[static_cast<std::size_t>(n)].push_back(std::move(t));
  }
  return by_order;
}

/// Stage weight vector g(t): e for the single vertex, otherwise the
/// componentwise product of A g(child) over the children.
template <ScalarType T>
Vector<T> stage_weights(const RootedTree& t, const Matrix<T>& a) {
  Vector<T> g = ones<T>(a.rows());
  for (const auto& c : t.children) {
    const Vector<T> ac = a * stage_weights(c, a);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= ac[i];
  }
  return g;
}

/// Elementary weight Phi(t) = b^T g(t).
template <ScalarType T>
T elementary_weight(const RootedTree& t, const Matrix<T>& a, const Vector<T>& b) {
  return dot(b, stage_weights(t, a));
}

}  // namespace wso
