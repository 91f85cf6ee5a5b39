#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include <json.hpp>

#include "nlframe/common.hpp"
#include "nlframe/norms.hpp"
#include "nlframe/spaces.hpp"

namespace nlframe {

/// Evaluation/Jacobian pair for a differentiable map F: R^n -> R^m.
/// When no analytic Jacobian is supplied, jacobian() falls back to
/// central finite differences.
class DifferentiableMap {
 public:
  using EvalFn = std::function<Vector(const Vector&)>;
  using JacFn = std::function<Matrix(const Vector&)>;

  DifferentiableMap(std::string name, int in_dim, int out_dim, EvalFn eval,
                    JacFn jac = nullptr, bool zero_normalized = false);

  Vector operator()(const Vector& x) const;
  Matrix jacobian(const Vector& x) const;
  bool has_analytic_jacobian() const { return static_cast<bool>(jac_); }

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  bool zero_normalized() const { return zero_normalized_; }
  const std::string& name() const { return name_; }

  // non-null iff F is exactly x -> Mx; lets optimization paths go convex
  const Matrix* linear_matrix() const { return linear_.get(); }
  void mark_linear(Matrix m) { linear_ = std::make_shared<const Matrix>(std::move(m)); }

 private:
  std::string name_;
  int in_dim_;
  int out_dim_;
  EvalFn eval_;
  JacFn jac_;
  bool zero_normalized_;
  std::shared_ptr<const Matrix> linear_;
};

double fd_default_step(const Vector& x);
Matrix fd_jacobian(const DifferentiableMap& f, const Vector& x, double h);

enum class Nonlinearity { Sin, Tanh };
Nonlinearity nonlinearity_from_string(const std::string& s);

/// Piecewise map R -> R^2: a circular arc capped by two tangent rays.
/// Uniformly stable derivative but not bi-Lipschitz (parallel rays).
/// Valid for eps in [0, pi/4).  The p-norm used to measure the output is
/// carried by the catalog entry, not the map itself.
DifferentiableMap e_map(double eps);

DifferentiableMap linear_map(const DenseOperator& t);

/// F(x) = Tx + eta * g(Tx) with g in {sin, tanh} applied componentwise.
DifferentiableMap perturbed_linear(const DenseOperator& t, double eta,
                                   Nonlinearity g);

/// Companding-sampling map S(x) = Psi f(Phi^T x) (rows of Phi/Psi are the
/// synthesis/sampling atoms) together with the surrogate linear operator
/// built from the inter-correlation matrices.
struct ScalarFunction {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
};
std::pair<DifferentiableMap, DenseOperator> companding_map(const Matrix& phi,
                                                           const Matrix& psi,
                                                           const ScalarFunction& f);

ScalarFunction scalar_identity();
ScalarFunction scalar_cubic(double c);  // t + c t^3

/// Catalog entry: a map plus the norm it is measured in and any constants
/// with documented provenance.
struct MapCatalogEntry {
  std::string name;
  DifferentiableMap map;
  NormSpec out_norm = NormSpec::l2();
  std::map<std::string, std::pair<double, std::string>> documented_constants;
};

MapCatalogEntry e_map_entry(double p, double eps);

// seeded generators used by configs and experiments
Matrix seeded_gaussian(int rows, int cols, std::uint64_t seed, double scale = 1.0);
Matrix seeded_orthogonal(int n, std::uint64_t seed);
// Q = spectral_norm * (random orthogonal), retried over derived seeds until
// the max-row-sum norm reaches min_linf_norm.
Matrix seeded_contraction(int n, double spectral_norm, double min_linf_norm,
                          std::uint64_t seed);

/// Deterministic reconstruction of a map from a JSON spec
/// { "kind": "e_map"|"perturbed_linear"|"companding"|"linear", ... }.
/// Maps that reference a linear operator take it from `t`.
DifferentiableMap map_from_spec(const nlohmann::json& spec,
                                const DenseOperator* t = nullptr);

}  // namespace nlframe
