#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "nlframe/common.hpp"
#include "nlframe/maps.hpp"
#include "nlframe/norms.hpp"
#include "nlframe/spaces.hpp"

namespace nlframe {

// Finite surrogate for the paper-level suprema over a whole space: seeded
// samples in a box plus shrinking local-search rounds around the running
// extremizer.  Enlarging n_pts/n_dir/refine_rounds keeps earlier samples
// as a prefix, so sup-type estimates are monotone along each axis.
struct SamplingPlan {
  double box_radius = 1.0;
  int n_dir = 32;
  int n_pts = 128;
  int refine_rounds = 30;
  std::uint64_t seed = 0;
  int threads = 1;

  nlohmann::json to_json() const;
  static SamplingPlan from_json(const nlohmann::json& j);
};

struct Witness {
  Vector x;
  Vector y;
  double value = 0.0;
};

// Every sampled constant is a max (resp. min) over evaluated points, hence a
// lower bound of the true sup (resp. upper bound of the true inf); the
// provenance field records that one-sidedness.
struct ConstantEstimate {
  std::string name;
  double value = 0.0;
  std::string provenance;  // exact | sampled-lower-bound | sampled-upper-bound | formula | fitted
  Witness witness;
  SamplingPlan plan;
  std::optional<double> grid_floor;  // alpha_F only: grid-certified floor

  nlohmann::json to_json() const;
};

struct Verdict {
  std::string condition;
  bool pass = false;
  double margin = 0.0;  // positive = satisfied with room

  nlohmann::json to_json() const;
};

struct CertificationReport {
  std::vector<ConstantEstimate> constants;
  std::vector<Verdict> verdicts;

  const ConstantEstimate* find(const std::string& name) const;
  nlohmann::json to_json() const;
};

struct StabilityEstimate {
  double a_hat = 0.0;  // sampled min of ||F'(x)y|| / ||y||
  double b_hat = 0.0;  // sampled max
  Witness min_witness;
  Witness max_witness;
  bool degenerate = false;  // a_hat vanished within 1e-12
};

StabilityEstimate uniform_stability(const DifferentiableMap& f, const SamplingPlan& plan,
                                    const NormSpec& out_norm = NormSpec::l2(),
                                    const NormSpec& in_norm = NormSpec::l2());

ConstantEstimate beta_FT(const DifferentiableMap& f, const DenseOperator& t,
                         const SamplingPlan& plan,
                         const NormSpec& out_norm = NormSpec::l2());

ConstantEstimate delta_FT(const DifferentiableMap& f, const DenseOperator& t,
                          const SamplingPlan& plan,
                          const NormSpec& out_norm = NormSpec::l2());

// Maximal angle between F'(x)y and Ty (Hilbert output norm).  Computed from
// the normalized chord via 2 asin(chord/2), which is exact for collinear
// directions where acos of a rounded cosine is not.
ConstantEstimate theta_FT(const DifferentiableMap& f, const DenseOperator& t,
                          const SamplingPlan& plan);

ConstantEstimate alpha_F(const DifferentiableMap& f, const SamplingPlan& plan,
                         const NormSpec& out_norm = NormSpec::l2(),
                         const DenseOperator* t = nullptr);

// Worst-case linearization error of F relative to T along directions in kA,
// computed cumulatively over j = 1..k so that the estimate is monotone in k.
ConstantEstimate gamma_kA(const DifferentiableMap& f, const DenseOperator& t,
                          const SubspaceUnion& u, int k, const SamplingPlan& plan,
                          const NormSpec& ball_norm = NormSpec::l2(),
                          std::size_t cap = kDefaultUnionCap);

// Exact restricted isometry constant of T on kA:
// max over subspaces V of max(sigma_max(TB_V)^2 - 1, 1 - sigma_min(TB_V)^2).
double rip_delta(const DenseOperator& t, const SubspaceUnion& u, int k,
                 std::size_t cap = kDefaultUnionCap);

struct SparseRieszConstants {
  double d = 1.0;
  double beta = 0.0;
  double margin = 0.0;  // sqrt(2)/2 - (sqrt(delta) + gamma)
};
// Throws CertificateRefused (with the margin) when sqrt(delta2) + gamma2 >= sqrt(2)/2.
SparseRieszConstants sparse_riesz_constants(double delta_2a, double gamma_2a);

struct AlmostLinearConstants {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};
AlmostLinearConstants almost_linear_constants(double gamma_2a, double gamma_4a);

// gamma3 = 1 - 2 D g1 - (D g1 + D g2 + beta) sqrt(aA sA); positive means the
// optimization error bounds apply.
double recovery_condition(double d, double beta, double gamma1, double gamma2,
                          double a_a, double s_a);

// Joint certification of one (F, T) pair on a shared sample grid.  Witness
// points found by one refinement are re-evaluated under the other objectives,
// so the algebraic relations between the constants hold per-sample.
struct OperatorConstants {
  double beta_hat = 0.0;
  double delta_hat = 0.0;
  double theta_hat = 0.0;
  double ratio_inf = 0.0;  // inf ||F'(x)y|| / ||Ty||
  double ratio_sup = 0.0;
  double f_min = 0.0;  // inf ||F'(x)y|| / ||y||
  double f_max = 0.0;
  double t_sigma_min = 0.0;
  double t_sigma_max = 0.0;
  bool degenerate = false;
  SamplingPlan plan;

  double t_norm() const { return t_sigma_max; }
  double tdag_norm() const { return 1.0 / t_sigma_min; }
};

OperatorConstants certify_pair(const DifferentiableMap& f, const DenseOperator& t,
                               const SamplingPlan& plan,
                               const NormSpec& out_norm = NormSpec::l2());

// Machine-checkable sufficient conditions from the bi-Lipschitz theory
// evaluated on sampled constants.
std::vector<Verdict> stability_verdicts(const OperatorConstants& c);

CertificationReport certify_catalog(const DifferentiableMap& f, const DenseOperator& t,
                                    const SamplingPlan& plan,
                                    const NormSpec& out_norm = NormSpec::l2(),
                                    bool with_alpha = true);

}  // namespace nlframe
