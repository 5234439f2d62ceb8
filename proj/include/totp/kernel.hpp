#pragma once

#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "totp/common.hpp"
#include "totp/tree.hpp"

namespace totp {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

namespace detail {
template <typename Scalar>
Scalar from_big(const BigInt& v) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return v.template convert_to<Scalar>();
  } else {
    return Scalar(v);
  }
}
}  // namespace detail

/// 1/alpha = sum over nodes of 2^(n - depth).
inline BigInt normalizer_inverse(const ExplicitTree& tree) {
  BigInt total = 0;
  for (const NodePath& p : tree.paths()) {
    total += pow2(static_cast<unsigned>(tree.height() - p.depth()));
  }
  return total;
}

/// The normalizing factor alpha of the stationary law. Throws on the empty tree.
inline Rational exact_alpha(const ExplicitTree& tree) {
  if (tree.empty()) {
    throw ParameterError("the empty tree has no stationary distribution");
  }
  return Rational(BigInt(1), normalizer_inverse(tree));
}

/// Lazy kernel in node-index order: stay 1/2 plus leftover mass, parent 1/4,
/// each present child 1/8.
template <typename Scalar>
Matrix<Scalar> lazy_transition_matrix(const ExplicitTree& tree) {
  const auto n = static_cast<Eigen::Index>(tree.size());
  Matrix<Scalar> p = Matrix<Scalar>::Zero(n, n);
  const Scalar up = Scalar(1) / Scalar(4);
  const Scalar down = Scalar(1) / Scalar(8);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto u = static_cast<ExplicitTree::Index>(i);
    Scalar moved = Scalar(0);
    if (tree.parent(u) != ExplicitTree::kNone) {
      p(i, tree.parent(u)) = up;
      moved += up;
    }
    for (unsigned b = 0; b < 2; ++b) {
      if (tree.child(u, b) != ExplicitTree::kNone) {
        p(i, tree.child(u, b)) = down;
        moved += down;
      }
    }
    p(i, i) = Scalar(1) - moved;
  }
  return p;
}

/// pi(i) = alpha * 2^(n - d_i) in node-index order.
template <typename Scalar>
RowVector<Scalar> stationary_row(const ExplicitTree& tree) {
  const Scalar norm = detail::from_big<Scalar>(normalizer_inverse(tree));
  RowVector<Scalar> pi(static_cast<Eigen::Index>(tree.size()));
  for (std::size_t i = 0; i < tree.size(); ++i) {
    pi(static_cast<Eigen::Index>(i)) =
        detail::from_big<Scalar>(pow2(static_cast<unsigned>(tree.height() - tree.depth(static_cast<ExplicitTree::Index>(i))))) /
        norm;
  }
  return pi;
}

/// Transpose of the lazy kernel restricted to the first `count` nodes (the
/// nodes of depth <= some d, given the index order). Column-stochastic.
Eigen::SparseMatrix<double> lazy_kernel_transpose(const ExplicitTree& tree, std::size_t max_depth);

}  // namespace totp
