#include "nlframe/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace nlframe {

namespace {

constexpr double kSpanTol = 1e-10;

double rank_tol(const Matrix& m, double sigma_max) {
  return std::max(m.rows(), m.cols()) * std::numeric_limits<double>::epsilon() *
         std::max(sigma_max, 1.0);
}

}  // namespace

DenseOperator::DenseOperator(Matrix m) : mat_(std::move(m)) {
  require(mat_.size() > 0, "DenseOperator: empty matrix");
  require(all_finite(mat_), "DenseOperator: non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(mat_);
  sigma_max_ = svd.singularValues()(0);
  sigma_min_ = svd.singularValues()(svd.singularValues().size() - 1);
}

Vector DenseOperator::apply(const Vector& x) const {
  require(x.size() == mat_.cols(), "DenseOperator::apply: dimension mismatch");
  return mat_ * x;
}

Vector DenseOperator::apply_adjoint(const Vector& y) const {
  require(y.size() == mat_.rows(), "DenseOperator::apply_adjoint: dimension mismatch");
  return mat_.transpose() * y;
}

bool DenseOperator::bounded_below() const {
  return rows() >= cols() && sigma_min_ > rank_tol(mat_, sigma_max_);
}

DenseOperator DenseOperator::left_inverse() const {
  if (!bounded_below())
    throw NoLeftInverse("left_inverse: operator is not bounded below (rank deficient or m < n)");
  Eigen::JacobiSVD<Matrix> svd(mat_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector inv_sigma = svd.singularValues().array().inverse();
  return DenseOperator(svd.matrixV() * inv_sigma.asDiagonal() *
                       svd.matrixU().transpose());
}

Matrix orthonormalize(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double tol = rank_tol(m, sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  require(rank > 0, "orthonormalize: zero matrix");
  return svd.matrixU().leftCols(rank);
}

SubspaceUnion SubspaceUnion::from_bases(std::vector<Matrix> bases) {
  require(!bases.empty(), "SubspaceUnion: empty union");
  SubspaceUnion u;
  u.ambient_dim_ = static_cast<int>(bases.front().rows());
  for (auto& b : bases) {
    require(b.rows() == u.ambient_dim_, "SubspaceUnion: inconsistent ambient dimension");
    require(b.cols() >= 1 && b.cols() <= b.rows(), "SubspaceUnion: bad subspace dimension");
    Matrix q = orthonormalize(b);
    require(q.cols() == b.cols(), "SubspaceUnion: rank-deficient basis");
    u.bases_.push_back(std::move(q));
  }
  return u;
}

SubspaceUnion SubspaceUnion::from_supports(int n, std::vector<std::vector<int>> supports) {
  require(n >= 1, "SubspaceUnion: ambient dimension must be positive");
  require(!supports.empty(), "SubspaceUnion: empty union");
  SubspaceUnion u;
  u.ambient_dim_ = n;
  for (auto& s : supports) {
    require(!s.empty(), "SubspaceUnion: empty support");
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    Matrix b = Matrix::Zero(n, static_cast<Eigen::Index>(s.size()));
    for (std::size_t j = 0; j < s.size(); ++j) {
      require(s[j] >= 0 && s[j] < n, "SubspaceUnion: support index out of range");
      b(s[j], static_cast<Eigen::Index>(j)) = 1.0;
    }
    u.bases_.push_back(std::move(b));
  }
  u.supports_ = std::move(supports);
  return u;
}

SubspaceUnion SubspaceUnion::coordinate_sparse(int n, int s) {
  require(n >= 1 && s >= 1 && s <= n, "coordinate_sparse: need 1 <= s <= n");
  std::vector<std::vector<int>> supports;
  std::vector<int> cur;
  // lexicographic enumeration of s-subsets of {0,...,n-1}
  cur.resize(s);
  for (int i = 0; i < s; ++i) cur[i] = i;
  while (true) {
    supports.push_back(cur);
    int i = s - 1;
    while (i >= 0 && cur[i] == n - s + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < s; ++j) cur[j] = cur[j - 1] + 1;
  }
  return from_supports(n, std::move(supports));
}

Vector project(const Vector& x, const Matrix& basis) {
  require(x.size() == basis.rows(), "project: dimension mismatch");
  return basis * (basis.transpose() * x);
}

std::pair<int, Vector> best_subspace(const Vector& x, const SubspaceUnion& u,
                                     const NormSpec& norm) {
  require(u.size() > 0, "best_subspace: empty union");
  require(x.size() == u.ambient_dim(), "best_subspace: dimension mismatch");
  if (!norm.is_l2())
    require(u.coordinate_aligned(),
            "best_subspace: non-l2 norms supported only for coordinate-aligned unions");
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  Vector best_proj;
  for (int i = 0; i < u.size(); ++i) {
    Vector proj;
    if (norm.is_l2() || !u.coordinate_aligned()) {
      proj = project(x, u.basis(i));
    } else {
      // coordinate truncation minimizes every absolute norm on the complement
      proj = Vector::Zero(x.size());
      for (int idx : u.support(i)) proj(idx) = x(idx);
    }
    double d = norm(x - proj);
    if (d < best_dist - 0.0) {  // strict improvement; ties keep lowest index
      best_dist = d;
      best = i;
      best_proj = std::move(proj);
    }
  }
  return {best, best_proj};
}

namespace {

// span(a) contained in span(b)?  (both orthonormal)
bool span_contained(const Matrix& a, const Matrix& b) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    Vector col = a.col(j);
    if ((col - project(col, b)).norm() > kSpanTol) return false;
  }
  return true;
}

std::size_t multiset_count(std::size_t n, int k) {
  // C(n + k - 1, k), saturating
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) c = c * static_cast<long double>(n + k - i) / i;
  if (c > 1e18L) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(c);
}

}  // namespace

SubspaceUnion sum_union(const SubspaceUnion& u, int k, std::size_t cap) {
  require(k >= 1, "sum_union: k must be >= 1");
  if (k == 1) return u;
  std::size_t count = multiset_count(static_cast<std::size_t>(u.size()), k);
  if (count > cap)
    throw ResourceLimit("sum_union: multiset enumeration size " + std::to_string(count) +
                        " exceeds cap " + std::to_string(cap));

  if (u.coordinate_aligned()) {
    // combine supports, then drop supports contained in another
    std::set<std::vector<int>> combined;
    std::vector<std::vector<int>> stack_cur(static_cast<std::size_t>(k));
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    // enumerate nondecreasing index tuples
    while (true) {
      std::set<int> sup;
      for (int a : idx) {
        const auto& s = u.support(a);
        sup.insert(s.begin(), s.end());
      }
      combined.emplace(sup.begin(), sup.end());
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == u.size() - 1) --pos;
      if (pos < 0) break;
      int v = idx[pos] + 1;
      for (int j = pos; j < k; ++j) idx[j] = v;
    }
    std::vector<std::vector<int>> keep;
    for (const auto& s : combined) {
      bool absorbed = false;
      for (const auto& t : combined) {
        if (&s == &t || t.size() <= s.size()) continue;
        if (std::includes(t.begin(), t.end(), s.begin(), s.end())) {
          absorbed = true;
          break;
        }
      }
      if (!absorbed) keep.push_back(s);
    }
    return SubspaceUnion::from_supports(u.ambient_dim(), std::move(keep));
  }

  std::vector<Matrix> spans;
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    Eigen::Index total = 0;
    for (int a : idx) total += u.basis(a).cols();
    Matrix cat(u.ambient_dim(), total);
    Eigen::Index at = 0;
    for (int a : idx) {
      cat.middleCols(at, u.basis(a).cols()) = u.basis(a);
      at += u.basis(a).cols();
    }
    spans.push_back(orthonormalize(cat));
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == u.size() - 1) --pos;
    if (pos < 0) break;
    int v = idx[pos] + 1;
    for (int j = pos; j < k; ++j) idx[j] = v;
  }
  // dedupe by span containment, keeping maximal spans
  std::vector<Matrix> keep;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    bool absorbed = false;
    for (std::size_t j = 0; j < spans.size() && !absorbed; ++j) {
      if (i == j) continue;
      if (spans[j].cols() < spans[i].cols()) continue;
      if (spans[j].cols() == spans[i].cols() && j > i &&
          span_contained(spans[i], spans[j]) && span_contained(spans[j], spans[i]))
        continue;  // exact duplicate: keep first occurrence
      if (span_contained(spans[i], spans[j]) &&
          (spans[j].cols() > spans[i].cols() ||
           (span_contained(spans[j], spans[i]) && j < i)))
        absorbed = true;
    }
    if (!absorbed) keep.push_back(spans[i]);
  }
  return SubspaceUnion::from_bases(std::move(keep));
}

}  // namespace nlframe
