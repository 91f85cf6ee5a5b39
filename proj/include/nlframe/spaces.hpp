#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nlframe/common.hpp"
#include "nlframe/norms.hpp"

namespace nlframe {

// Dense linear operator with cached extreme singular values.
class DenseOperator {
 public:
  explicit DenseOperator(Matrix m);

  Eigen::Index rows() const { return mat_.rows(); }
  Eigen::Index cols() const { return mat_.cols(); }
  const Matrix& matrix() const { return mat_; }

  Vector apply(const Vector& x) const;
  Vector apply_adjoint(const Vector& y) const;

  double sigma_max() const { return sigma_max_; }
  double sigma_min() const { return sigma_min_; }

  // Full column rank and at least as many rows as columns.
  bool bounded_below() const;

  // Moore-Penrose left inverse; throws NoLeftInverse when rank deficient.
  DenseOperator left_inverse() const;

 private:
  Matrix mat_;
  double sigma_max_ = 0.0;
  double sigma_min_ = 0.0;
};

inline std::pair<double, double> singular_bounds(const DenseOperator& t) {
  return {t.sigma_min(), t.sigma_max()};
}

// Union of closed linear subspaces, each stored as an orthonormal basis.
// Coordinate-aligned unions additionally remember their supports, which
// unlocks exact minimization under (weighted-)l1 norms.
class SubspaceUnion {
 public:
  static SubspaceUnion from_bases(std::vector<Matrix> bases);
  // All C(n, s) spans of s coordinate axes in R^n.
  static SubspaceUnion coordinate_sparse(int n, int s);
  static SubspaceUnion from_supports(int n, std::vector<std::vector<int>> supports);

  int size() const { return static_cast<int>(bases_.size()); }
  int ambient_dim() const { return ambient_dim_; }
  const Matrix& basis(int i) const { return bases_.at(i); }
  const std::vector<Matrix>& bases() const { return bases_; }

  bool coordinate_aligned() const { return supports_.has_value(); }
  const std::vector<int>& support(int i) const { return supports_.value().at(i); }
  const std::vector<std::vector<int>>& supports() const { return supports_.value(); }

 private:
  SubspaceUnion() = default;
  std::vector<Matrix> bases_;
  int ambient_dim_ = 0;
  std::optional<std::vector<std::vector<int>>> supports_;
};

// Orthogonal projection B B^T x onto the column span of an orthonormal basis.
Vector project(const Vector& x, const Matrix& basis);

// Index and projection of the subspace minimizing ||x - P_i x|| in `norm`;
// ties break toward the lowest index. Non-l2 norms require a coordinate-
// aligned union (minimizer is coordinate truncation there).
std::pair<int, Vector> best_subspace(const Vector& x, const SubspaceUnion& u,
                                     const NormSpec& norm);

inline constexpr std::size_t kDefaultUnionCap = 200000;

// Minkowski sum A + ... + A (k copies) enumerated as spans of index
// multisets, deduplicated by span containment.
SubspaceUnion sum_union(const SubspaceUnion& u, int k,
                        std::size_t cap = kDefaultUnionCap);

// Orthonormalize the columns of m (SVD, rank-truncated).
Matrix orthonormalize(const Matrix& m);

}  // namespace nlframe
