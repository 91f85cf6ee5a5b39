#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "nlframe/certify.hpp"
#include "nlframe/common.hpp"
#include "nlframe/maps.hpp"
#include "nlframe/norms.hpp"
#include "nlframe/spaces.hpp"

namespace nlframe {

struct SolverConfig {
  double mu = 1.0;
  int max_iter = 20000;
  double tol = 1e-12;
  NormSpec stop_norm = NormSpec::l2();
  bool force = false;       // run even when a certificate gate fails
  int trace_thin = 1;       // keep every k-th iterate in the trace
};

struct SolverReport {
  std::string algorithm;
  std::vector<Vector> iterates;
  std::vector<double> residuals;  // ||x_{n+1} - x_n|| in the stop norm
  std::vector<double> ratios;     // consecutive residual ratios
  Vector final_point;
  int iterations = 0;
  bool converged = false;

  double r0_predicted = std::numeric_limits<double>::quiet_NaN();
  bool ratio_law_ok = true;  // every measured ratio <= r0_predicted + 1e-9
  double error_coefficient = std::numeric_limits<double>::quiet_NaN();
  double tail_bound_coefficient = std::numeric_limits<double>::quiet_NaN();
  double consistency_residual = std::numeric_limits<double>::quiet_NaN();

  bool certified = true;  // false when gates failed and force was set
  std::vector<Verdict> gate_verdicts;

  // fixed-point / localized extras
  std::vector<double> product_norms;  // ||T_n ... T_1|| in the algebra norm
  double fitted_rate = std::numeric_limits<double>::quiet_NaN();
  double fitted_scale = std::numeric_limits<double>::quiet_NaN();
  double error_bound_linf_coeff = std::numeric_limits<double>::quiet_NaN();

  nlohmann::json to_json() const;
};

// x_{n+1} = x_n - mu Tdag (F(x_n) - z).  Gates: mu <= 1/sup(||F'y||/||Ty||)
// and beta_FT ||T|| ||Tdag|| < 1, both from sampled constants.
SolverReport left_inverse_iteration(const DifferentiableMap& f, const DenseOperator& t,
                                    const DenseOperator& tdag, const Vector& z,
                                    const SolverConfig& cfg,
                                    const OperatorConstants& constants,
                                    const Vector& x0 = Vector());

// u_{n+1} = u_n - mu T* (F(u_n) - z).  Gates: beta_FT < sqrt(2) and mu inside
// the (2 - beta^2) window.
SolverReport van_cittert_iteration(const DifferentiableMap& f, const DenseOperator& t,
                                   const Vector& z, const SolverConfig& cfg,
                                   const OperatorConstants& constants,
                                   const Vector& x0 = Vector());

// x_{n+1} = G(x_n) with contraction certified in the Hilbert (spectral) norm
// only; convergence measured in the sup norm.  Tracks the max-row-sum norms
// of the interval-averaged Jacobian products and fits b_n <= C r1^n.
SolverReport fixed_point_iteration(const DifferentiableMap& g, const SolverConfig& cfg,
                                   const SamplingPlan& plan, const Vector& x0 = Vector());

// Van-Cittert recursion driven through the fixed-point machinery: contraction
// certified in l2, convergence and the error constant reported in linf.
SolverReport localized_iteration(const DifferentiableMap& f, const DenseOperator& t,
                                 const Vector& z, const SolverConfig& cfg,
                                 const OperatorConstants& constants,
                                 const SamplingPlan& plan, const Vector& x0 = Vector());

// Smallest D with ||T1 T2||_A <= D ||T1||_A ||T2||_A (r1^theta + r2^theta)
// over the sample pairs, r_i = ||T_i||_H / ||T_i||_A; A = max-row-sum norm,
// H = spectral norm.  Empirical evidence, not a proof.
struct SubalgebraFit {
  double theta = 1.0;
  double d_fit = 0.0;
  std::size_t witness_pair = 0;
};
std::vector<SubalgebraFit> subalgebra_fit(
    const std::vector<std::pair<Matrix, Matrix>>& pairs,
    const std::vector<double>& thetas = {1.0, 0.5});

double linf_op_norm(const Matrix& m);
double spectral_norm(const Matrix& m);

// Interval-averaged Jacobian of g along [a, b] (Gauss-Legendre, 8 nodes).
Matrix averaged_jacobian(const DifferentiableMap& g, const Vector& a, const Vector& b);

}  // namespace nlframe
