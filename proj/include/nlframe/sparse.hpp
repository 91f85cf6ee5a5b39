#pragma once

#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlframe/certify.hpp"
#include "nlframe/common.hpp"
#include "nlframe/maps.hpp"
#include "nlframe/norms.hpp"
#include "nlframe/spaces.hpp"

namespace nlframe {

/// Sparse approximation triple (A, M, H1): a union of coordinate subspaces,
/// an M-norm rescaled so the imbedding M -> H1 has norm one, and the l2 norm.
/// Classical(n, s) is plain l1 over s-sparse supports; the weighted-l1 family
/// is the one registered custom triple.
class SparseTriple {
 public:
  enum class Kind { Classical, WeightedL1 };

  static SparseTriple classical(int n, int s);
  static SparseTriple weighted(int n, int s, Vector weights);
  // testing hook: skips the imbedding rescale (negative control for axiom (i))
  static SparseTriple classical_misscaled(int n, int s, double scale);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  int s() const { return s_; }
  const SubspaceUnion& subspaces() const { return union_; }
  const NormSpec& m_norm() const { return m_norm_; }
  const NormSpec& h_norm() const { return h_norm_; }
  // per-coordinate weight including the rescale factor
  double coord_weight(int i) const;

  std::string describe() const;
  static SparseTriple from_string(const std::string& spec);  // "classical:n=12,s=2"

 private:
  SparseTriple(Kind kind, int n, int s, SubspaceUnion u, NormSpec m)
      : kind_(kind), n_(n), s_(s), union_(std::move(u)), m_norm_(std::move(m)) {}
  Kind kind_;
  int n_;
  int s_;
  SubspaceUnion union_;
  NormSpec m_norm_;
  NormSpec h_norm_ = NormSpec::l2();
};

struct Approximation {
  Vector point;          // x_{A,M}
  std::vector<int> support;
  double distance = 0.0;  // sigma_{A,M}(x) in the M norm
};

// Keep the s coordinates with the largest weighted magnitude (ties toward the
// lowest index); for the classical triple this is simultaneously the M- and
// H-norm best approximator over the union.
Approximation best_approximator(const Vector& x, const SparseTriple& triple);

// Best approximator of the residual x - x_{A,M}.
Approximation second_approximator(const Vector& x, const SparseTriple& triple);

// Best approximation error from kA (supports of size <= k s), exact for the
// registered coordinate triples.
double sigma_kAM(const Vector& x, const SparseTriple& triple, int k);

// Classical: exactly s. Weighted: sampled sup of (||x||_M / ||x||_H)^2 over
// per-subspace unit spheres (with the Cauchy-Schwarz extremizer included).
double s_A(const SparseTriple& triple, const SamplingPlan& plan = SamplingPlan{});

// Sampled sup over x of (||u_{A,M}||_H / ||x_{A,M}||_M)^2, enriched with
// equal-magnitude candidates; a lower bound of the true ratio (1/s classical).
double a_A(const SparseTriple& triple, const SamplingPlan& plan);

struct GreedyResult {
  std::vector<Vector> iterates;      // x^0 = 0, x^1, ..., x^K
  std::vector<double> step_norms_m;  // ||u_k||_M
  std::vector<double> errors_m;      // ||x - x^k||_M, k = 0..K
  double telescoping_defect = 0.0;   // | sum ||u_k||_M + ||x - x^K||_M - ||x||_M |
};
GreedyResult greedy(const Vector& x, const SparseTriple& triple, int steps);

// || x - x_{A,M} ||_H <= sqrt(a_A) ||x||_M + tol  (the proof's constant).
bool prop41_check(const Vector& x, const SparseTriple& triple, double tol = 1e-9,
                  std::optional<double> a_a_value = std::nullopt);

struct PredictedBounds {
  bool applicable = false;
  double gamma3 = 0.0;
  double bound_h = 0.0;
  double bound_m = 0.0;
};
PredictedBounds predict_bounds(double d, double beta, double gamma1, double gamma2,
                               double a_a, double s_a, double sigma, double eps);

struct TheoremConstants {
  double d = 1.0;
  double beta = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double a_a = 1.0;
  double s_a = 1.0;
  std::map<std::string, std::string> provenance;
};

enum class RecoverMethod { SupportEnum, Penalty };

struct RecoverOptions {
  double feas_tol = 1e-8;
  int max_support_size = -1;      // default min(n, m)
  std::size_t enum_cap = 200000;  // number of enumerated supports
  int gn_max_iter = 120;
  double gn_tol = 1e-13;
  int penalty_stages = 10;
  int penalty_inner_iters = 400;
  std::uint64_t seed = 0;
  const TheoremConstants* constants = nullptr;  // enables predicted bounds
  const Vector* x_true = nullptr;               // enables measured errors
};

struct RecoveryReport {
  Vector x_star;
  double m_norm_value = 0.0;
  double feasibility_residual = 0.0;
  double eps = 0.0;
  std::string method;
  bool oracle_certified = false;  // support-enum: global over enumerated supports
  std::vector<int> support;

  PredictedBounds bounds;
  std::map<std::string, double> constants;
  std::map<std::string, std::string> provenance;
  double sigma_x0 = std::numeric_limits<double>::quiet_NaN();
  double measured_err_h = std::numeric_limits<double>::quiet_NaN();
  double measured_err_m = std::numeric_limits<double>::quiet_NaN();

  nlohmann::json to_json() const;
};

// argmin ||x||_M subject to ||F(x) - z|| <= eps.  Support enumeration is the
// oracle (exact convex subproblems for linear F, Gauss-Newton feasibility +
// shrink heuristic otherwise); penalty continuation is the scalable path.
RecoveryReport recover(const DifferentiableMap& f, const Vector& z, double eps,
                       const SparseTriple& triple, RecoverMethod method,
                       const RecoverOptions& opts = {});

std::vector<Verdict> verify_axioms(const SparseTriple& triple, const SamplingPlan& plan);

}  // namespace nlframe
