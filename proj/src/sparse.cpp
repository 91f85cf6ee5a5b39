#include "nlframe/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nlframe {

namespace {

// indices ordered by weighted magnitude (desc), index (asc)
std::vector<int> magnitude_order(const Vector& x, const SparseTriple& triple) {
  std::vector<int> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return triple.coord_weight(a) * std::abs(x(a)) >
           triple.coord_weight(b) * std::abs(x(b));
  });
  return idx;
}

Approximation keep_top(const Vector& x, const SparseTriple& triple, int keep) {
  auto order = magnitude_order(x, triple);
  Approximation a;
  a.point = Vector::Zero(x.size());
  keep = std::min<int>(keep, static_cast<int>(x.size()));
  a.support.assign(order.begin(), order.begin() + keep);
  std::sort(a.support.begin(), a.support.end());
  for (int i : a.support) a.point(i) = x(i);
  a.distance = triple.m_norm()(x - a.point);
  return a;
}

std::uint64_t comb(int n, int k) {
  if (k < 0 || k > n) return 0;
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return static_cast<std::uint64_t>(c + 0.5L);
}

Vector gauss_vec(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

}  // namespace

SparseTriple SparseTriple::classical(int n, int s) {
  require(n >= 1 && s >= 1 && s <= n, "SparseTriple: need 1 <= s <= n");
  return SparseTriple(Kind::Classical, n, s, SubspaceUnion::coordinate_sparse(n, s),
                      NormSpec::l1());
}

SparseTriple SparseTriple::weighted(int n, int s, Vector weights) {
  require(n >= 1 && s >= 1 && s <= n, "SparseTriple: need 1 <= s <= n");
  require(weights.size() == n, "SparseTriple: weight dimension mismatch");
  require((weights.array() > 0.0).all(), "SparseTriple: weights must be positive");
  // imbedding norm sup ||x||_2 / ||x||_M equals 1/min(w); rescale it to one
  double wmin = weights.minCoeff();
  NormSpec m = NormSpec::weighted_l1(std::move(weights), 1.0 / wmin);
  return SparseTriple(Kind::WeightedL1, n, s, SubspaceUnion::coordinate_sparse(n, s),
                      std::move(m));
}

SparseTriple SparseTriple::classical_misscaled(int n, int s, double scale) {
  require(scale > 0.0, "SparseTriple: bad scale");
  return SparseTriple(Kind::Classical, n, s, SubspaceUnion::coordinate_sparse(n, s),
                      NormSpec::l1(scale));
}

double SparseTriple::coord_weight(int i) const {
  require(i >= 0 && i < n_, "SparseTriple: coordinate out of range");
  if (m_norm_.is_weighted()) return m_norm_.scale() * m_norm_.weights()(i);
  return m_norm_.scale();
}

std::string SparseTriple::describe() const {
  std::ostringstream os;
  os << (kind_ == Kind::Classical ? "classical" : "weighted") << ":n=" << n_
     << ",s=" << s_;
  return os.str();
}

SparseTriple SparseTriple::from_string(const std::string& spec) {
  auto colon = spec.find(':');
  require(colon != std::string::npos, "triple spec: expected kind:params");
  std::string kind = spec.substr(0, colon);
  int n = -1, s = -1;
  std::vector<double> w;
  std::stringstream ss(spec.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    require(eq != std::string::npos, "triple spec: expected key=value, got '" + item + "'");
    std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    if (key == "n")
      n = std::stoi(val);
    else if (key == "s")
      s = std::stoi(val);
    else if (key == "w")
      w.push_back(std::stod(val));
    else
      throw InvalidInput("triple spec: unknown key '" + key + "'");
  }
  require(n > 0 && s > 0, "triple spec: need n and s");
  if (kind == "classical") return classical(n, s);
  if (kind == "weighted") {
    require(static_cast<int>(w.size()) == n, "triple spec: weighted needs n 'w=' entries");
    return weighted(n, s, Eigen::Map<Vector>(w.data(), n));
  }
  throw InvalidInput("triple spec: unknown kind '" + kind + "'");
}

Approximation best_approximator(const Vector& x, const SparseTriple& triple) {
  require(x.size() == triple.n(), "best_approximator: dimension mismatch");
  return keep_top(x, triple, triple.s());
}

Approximation second_approximator(const Vector& x, const SparseTriple& triple) {
  Approximation first = best_approximator(x, triple);
  return best_approximator(x - first.point, triple);
}

double sigma_kAM(const Vector& x, const SparseTriple& triple, int k) {
  require(k >= 1, "sigma_kAM: k must be >= 1");
  return keep_top(x, triple, k * triple.s()).distance;
}

double s_A(const SparseTriple& triple, const SamplingPlan& plan) {
  if (triple.kind() == SparseTriple::Kind::Classical &&
      triple.m_norm().scale() == 1.0)
    return static_cast<double>(triple.s());
  // sampled sup of (||x||_M / ||x||_H)^2 per subspace, seeded with the
  // Cauchy-Schwarz extremizer x_i ~ w_i
  double best = 0.0;
  const auto& u = triple.subspaces();
  for (int v = 0; v < u.size(); ++v) {
    const auto& sup = u.support(v);
    Vector cand = Vector::Zero(triple.n());
    for (int i : sup) cand(i) = triple.coord_weight(i);
    double m = triple.m_norm()(cand), h = triple.h_norm()(cand);
    if (h > 0.0) best = std::max(best, (m / h) * (m / h));
    for (int d = 0; d < plan.n_dir; ++d) {
      auto rng = substream(plan.seed, "sA", static_cast<std::uint64_t>(v),
                           static_cast<std::uint64_t>(d));
      Vector c = gauss_vec(rng, static_cast<Eigen::Index>(sup.size()));
      Vector y = Vector::Zero(triple.n());
      for (std::size_t j = 0; j < sup.size(); ++j) y(sup[j]) = c(static_cast<Eigen::Index>(j));
      double hm = triple.h_norm()(y);
      if (hm <= 0.0) continue;
      double r = triple.m_norm()(y) / hm;
      best = std::max(best, r * r);
    }
  }
  return best;
}

double a_A(const SparseTriple& triple, const SamplingPlan& plan) {
  const int n = triple.n();
  const int s = triple.s();
  auto ratio_of = [&](const Vector& x) {
    Approximation first = best_approximator(x, triple);
    double denom = triple.m_norm()(first.point);
    if (!(denom > 1e-14)) return 0.0;  // x = 0 samples are skipped
    Approximation second = best_approximator(x - first.point, triple);
    double num = triple.h_norm()(second.point);
    double r = num / denom;
    return r * r;
  };

  double best = 0.0;
  Vector best_x;
  // equal-magnitude vectors on 2s coordinates witness the classical value 1/s
  for (int start = 0; start + 2 * s <= n; ++start) {
    Vector x = Vector::Zero(n);
    for (int i = 0; i < 2 * s; ++i) x(start + i) = 1.0;
    double r = ratio_of(x);
    if (r > best) {
      best = r;
      best_x = x;
    }
  }
  for (int i = 0; i < plan.n_pts; ++i) {
    auto rng = substream(plan.seed, "aA", static_cast<std::uint64_t>(i));
    Vector x = gauss_vec(rng, n);
    double r = ratio_of(x);
    if (r > best) {
      best = r;
      best_x = x;
    }
  }
  if (best_x.size() > 0) {
    for (int round = 0; round < plan.refine_rounds; ++round) {
      auto rng = substream(plan.seed, "aA_refine", static_cast<std::uint64_t>(round));
      double radius = 0.35 * std::pow(0.72, round);
      for (int probe = 0; probe < 12; ++probe) {
        Vector cand = best_x + radius * gauss_vec(rng, n);
        double r = ratio_of(cand);
        if (r > best) {
          best = r;
          best_x = cand;
        }
      }
    }
  }
  return best;
}

GreedyResult greedy(const Vector& x, const SparseTriple& triple, int steps) {
  require(steps >= 1, "greedy: need at least one step");
  GreedyResult res;
  Vector xk = Vector::Zero(x.size());
  res.iterates.push_back(xk);
  res.errors_m.push_back(triple.m_norm()(x));
  double sum_steps = 0.0;
  for (int k = 0; k < steps; ++k) {
    Approximation step = best_approximator(x - xk, triple);
    xk += step.point;
    res.iterates.push_back(xk);
    res.step_norms_m.push_back(triple.m_norm()(step.point));
    sum_steps += res.step_norms_m.back();
    res.errors_m.push_back(triple.m_norm()(x - xk));
  }
  res.telescoping_defect =
      std::abs(sum_steps + res.errors_m.back() - triple.m_norm()(x));
  return res;
}

bool prop41_check(const Vector& x, const SparseTriple& triple, double tol,
                  std::optional<double> a_a_value) {
  double a;
  if (a_a_value) {
    a = *a_a_value;
  } else if (triple.kind() == SparseTriple::Kind::Classical) {
    a = 1.0 / static_cast<double>(triple.s());
  } else {
    throw InvalidInput("prop41_check: pass a_A for non-classical triples");
  }
  Approximation first = best_approximator(x, triple);
  return triple.h_norm()(x - first.point) <=
         std::sqrt(a) * triple.m_norm()(x) + tol;
}

PredictedBounds predict_bounds(double d, double beta, double gamma1, double gamma2,
                               double a_a, double s_a, double sigma, double eps) {
  PredictedBounds b;
  b.gamma3 = recovery_condition(d, beta, gamma1, gamma2, a_a, s_a);
  if (!(b.gamma3 > 0.0)) return b;  // inapplicable, bounds stay unset
  b.applicable = true;
  double root_as = std::sqrt(a_a * s_a);
  b.bound_h = ((2.0 + 8.0 * d * gamma2 + 4.0 * beta) / b.gamma3) * std::sqrt(a_a) * sigma +
              ((2.0 + root_as) * d / b.gamma3) * eps;
  b.bound_m =
      ((2.0 - 4.0 * d * gamma1 + 2.0 * (d * gamma1 + 2.0 * d * gamma2 + beta) * root_as) /
       b.gamma3) *
          sigma +
      (2.0 * d / b.gamma3) * std::sqrt(s_a) * eps;
  return b;
}

namespace {

// ---- support-enumeration machinery ----

struct SupportSolution {
  bool feasible = false;
  Vector x;  // full-dimensional
  double objective = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
};

Vector embed(const Vector& u, const std::vector<int>& support, int n) {
  Vector x = Vector::Zero(n);
  for (std::size_t j = 0; j < support.size(); ++j) x(support[j]) = u(static_cast<Eigen::Index>(j));
  return x;
}

// coordinate descent for 0.5||Au - z||^2 + lambda sum w_j |u_j|
void lasso_cd(const Matrix& a, const Vector& z, const Vector& w, double lambda,
              Vector& u, int max_sweeps = 4000, double tol = 1e-14) {
  Vector col_sq = a.colwise().squaredNorm();
  Vector r = z - a * u;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double dmax = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (col_sq(j) <= 0.0) continue;
      double rho = a.col(j).dot(r) + col_sq(j) * u(j);
      double thr = lambda * w(j);
      double unew = 0.0;
      if (rho > thr)
        unew = (rho - thr) / col_sq(j);
      else if (rho < -thr)
        unew = (rho + thr) / col_sq(j);
      if (unew != u(j)) {
        r += a.col(j) * (u(j) - unew);
        dmax = std::max(dmax, std::abs(unew - u(j)));
        u(j) = unew;
      }
    }
    if (dmax < tol) break;
  }
}

SupportSolution solve_support_linear(const Matrix& a_full, const Vector& z, double eps,
                                     const std::vector<int>& support,
                                     const SparseTriple& triple) {
  SupportSolution sol;
  const int n = static_cast<int>(a_full.cols());
  if (support.empty()) {
    double r = z.norm();
    if (r <= eps + 1e-12) {
      sol.feasible = true;
      sol.x = Vector::Zero(n);
      sol.objective = 0.0;
      sol.residual = r;
    }
    return sol;
  }
  Matrix a(a_full.rows(), static_cast<Eigen::Index>(support.size()));
  Vector w(static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) {
    a.col(static_cast<Eigen::Index>(j)) = a_full.col(support[j]);
    w(static_cast<Eigen::Index>(j)) = triple.coord_weight(support[j]);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < a.cols()) return sol;  // a full-rank support attains the optimum
  Vector u_ls = qr.solve(z);
  double r_min = (a * u_ls - z).norm();
  if (r_min > eps + 1e-12) return sol;

  Vector u;
  if (eps <= 1e-14 || r_min >= eps) {
    u = u_ls;  // feasible set degenerates to the least-squares point
  } else if (z.norm() <= eps) {
    u = Vector::Zero(a.cols());
  } else {
    // bisect the penalty level until the residual meets the eps-sphere
    double lam_hi = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      lam_hi = std::max(lam_hi, std::abs(a.col(j).dot(z)) / w(j));
    lam_hi = lam_hi * 1.0001 + 1e-12;
    double lam_lo = 0.0;
    Vector u_mid = u_ls;
    Vector u_feas = u_ls;
    for (int it = 0; it < 100; ++it) {
      double lam = 0.5 * (lam_lo + lam_hi);
      lasso_cd(a, z, w, lam, u_mid);
      double phi = (a * u_mid - z).norm();
      if (phi > eps) {
        lam_hi = lam;
      } else {
        lam_lo = lam;
        u_feas = u_mid;
      }
    }
    u = u_feas;
  }
  sol.feasible = true;
  sol.x = embed(u, support, n);
  sol.residual = (a * u - z).norm();
  sol.objective = triple.m_norm()(sol.x);
  return sol;
}

double residual_at(const DifferentiableMap& f, const Vector& x, const Vector& z) {
  return (f(x) - z).norm();
}

// damped Gauss-Newton feasibility on a fixed support
Vector gauss_newton_feasibility(const DifferentiableMap& f, const Vector& z,
                                const std::vector<int>& support, int max_iter,
                                double tol) {
  const int n = f.in_dim();
  Vector u = Vector::Zero(static_cast<Eigen::Index>(support.size()));
  double res = residual_at(f, embed(u, support, n), z);
  for (int it = 0; it < max_iter; ++it) {
    Vector x = embed(u, support, n);
    Vector r = f(x) - z;
    Matrix jac = f.jacobian(x);
    Matrix js(jac.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j)
      js.col(static_cast<Eigen::Index>(j)) = jac.col(support[j]);
    Vector delta = js.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-r);
    if (!all_finite(delta)) break;
    double alpha = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 30; ++bt) {
      Vector cand = u + alpha * delta;
      double cres = residual_at(f, embed(cand, support, n), z);
      if (cres < res) {
        u = cand;
        res = cres;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved || alpha * delta.norm() < tol) break;
  }
  return u;
}

SupportSolution solve_support_nonlinear(const DifferentiableMap& f, const Vector& z,
                                        double eps, const std::vector<int>& support,
                                        const SparseTriple& triple,
                                        const RecoverOptions& opts) {
  SupportSolution sol;
  const int n = f.in_dim();
  const double feas = eps + 1e-9;
  if (support.empty()) {
    double r = z.norm();
    if (r <= feas) {
      sol.feasible = true;
      sol.x = Vector::Zero(n);
      sol.objective = 0.0;
      sol.residual = r;
    }
    return sol;
  }
  Vector u = gauss_newton_feasibility(f, z, support, opts.gn_max_iter, opts.gn_tol);
  Vector x_f = embed(u, support, n);
  double r_min = residual_at(f, x_f, z);
  if (r_min > feas) return sol;

  // one-dimensional M-norm line search toward 0 along the feasibility ray
  auto feasible_at = [&](double t) { return residual_at(f, t * x_f, z) <= feas; };
  double t_star = 1.0;
  const int grid = 128;
  int first_ok = grid;
  for (int k = 0; k <= grid; ++k) {
    if (feasible_at(static_cast<double>(k) / grid)) {
      first_ok = k;
      break;
    }
  }
  if (first_ok == 0) {
    t_star = 0.0;
  } else {
    double lo = static_cast<double>(first_ok - 1) / grid;
    double hi = static_cast<double>(first_ok) / grid;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (feasible_at(mid))
        hi = mid;
      else
        lo = mid;
    }
    t_star = hi;
  }
  Vector x = t_star * x_f;

  // feasible coordinate shrink: monotone M-norm descent
  double maxabs = x.cwiseAbs().maxCoeff();
  for (double scale = 0.5; scale > 1e-7; scale *= 0.5) {
    bool any = true;
    while (any) {
      any = false;
      for (int i : support) {
        if (x(i) == 0.0) continue;
        double delta = scale * std::max(std::abs(x(i)), 0.01 * maxabs);
        double saved = x(i);
        x(i) = (saved > 0.0) ? std::max(0.0, saved - delta)
                             : std::min(0.0, saved + delta);
        if (residual_at(f, x, z) <= feas) {
          any = true;
        } else {
          x(i) = saved;
        }
      }
    }
  }
  sol.feasible = true;
  sol.x = x;
  sol.residual = residual_at(f, x, z);
  sol.objective = triple.m_norm()(x);
  return sol;
}

// all supports of sizes 0..max_size in (size, lexicographic) order
std::vector<std::vector<int>> enumerate_supports(int n, int max_size,
                                                 std::size_t cap) {
  std::uint64_t total = 0;
  for (int d = 0; d <= max_size; ++d) total += comb(n, d);
  if (total > cap)
    throw ResourceLimit("recover: support enumeration size " + std::to_string(total) +
                        " exceeds cap " + std::to_string(cap));
  std::vector<std::vector<int>> out;
  out.emplace_back();  // empty support = zero candidate
  for (int d = 1; d <= max_size; ++d) {
    std::vector<int> cur(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) cur[static_cast<std::size_t>(i)] = i;
    while (true) {
      out.push_back(cur);
      int i = d - 1;
      while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - d + i) --i;
      if (i < 0) break;
      ++cur[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < d; ++j)
        cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

Vector recover_penalty_path(const DifferentiableMap& f, const Vector& z, double eps,
                            const SparseTriple& triple, const RecoverOptions& opts) {
  const int n = f.in_dim();
  Vector x = Vector::Zero(n);
  Vector w(n);
  for (int i = 0; i < n; ++i) w(i) = triple.coord_weight(i);

  auto hinge = [&](const Vector& v) {
    return std::max(0.0, (f(v) - z).norm() - eps);
  };
  double lambda = 1.0;
  for (int stage = 0; stage < opts.penalty_stages; ++stage) {
    double jnorm2 = std::max(1.0, f.jacobian(x).squaredNorm());
    double step = 1.0 / (2.0 * lambda * jnorm2 + 1.0);
    double obj = triple.m_norm()(x) + lambda * hinge(x) * hinge(x);
    for (int it = 0; it < opts.penalty_inner_iters; ++it) {
      Vector r = f(x) - z;
      double rn = r.norm();
      double h = std::max(0.0, rn - eps);
      Vector grad = Vector::Zero(n);
      if (h > 0.0 && rn > 1e-300)
        grad = (2.0 * lambda * h / rn) * (f.jacobian(x).transpose() * r);
      bool accepted = false;
      for (int bt = 0; bt < 40; ++bt) {
        Vector y = x - step * grad;
        // prox of the (weighted) l1 norm
        for (int i = 0; i < n; ++i) {
          double thr = step * w(i);
          if (y(i) > thr)
            y(i) -= thr;
          else if (y(i) < -thr)
            y(i) += thr;
          else
            y(i) = 0.0;
        }
        double cand_obj = triple.m_norm()(y) + lambda * hinge(y) * hinge(y);
        if (cand_obj <= obj + 1e-15) {
          double move = (y - x).lpNorm<Eigen::Infinity>();
          x = std::move(y);
          obj = cand_obj;
          step *= 1.2;
          accepted = true;
          if (move < 1e-13 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) it = opts.penalty_inner_iters;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    lambda *= 8.0;
  }
  return x;
}

}  // namespace

nlohmann::json RecoveryReport::to_json() const {
  nlohmann::json j{{"kind", "recovery"},
                   {"tool", "nlframe"},
                   {"version", kVersion},
                   {"method", method},
                   {"oracle_certified", oracle_certified},
                   {"eps", eps},
                   {"m_norm", m_norm_value},
                   {"feasibility_residual", feasibility_residual}};
  j["x_star"] = std::vector<double>(x_star.data(), x_star.data() + x_star.size());
  j["support"] = support;
  if (bounds.applicable) {
    j["predicted"] = {{"gamma3", bounds.gamma3},
                      {"bound_h", bounds.bound_h},
                      {"bound_m", bounds.bound_m}};
  } else if (!constants.empty()) {
    j["predicted"] = {{"gamma3", bounds.gamma3}, {"note", "theorem inapplicable"}};
  }
  if (!constants.empty()) j["constants"] = constants;
  if (!provenance.empty()) j["provenance"] = provenance;
  if (std::isfinite(sigma_x0)) j["sigma_x0"] = sigma_x0;
  if (std::isfinite(measured_err_h)) j["measured_err_h"] = measured_err_h;
  if (std::isfinite(measured_err_m)) j["measured_err_m"] = measured_err_m;
  return j;
}

RecoveryReport recover(const DifferentiableMap& f, const Vector& z, double eps,
                       const SparseTriple& triple, RecoverMethod method,
                       const RecoverOptions& opts) {
  require(f.in_dim() == triple.n(), "recover: map/triple dimension mismatch");
  require(z.size() == f.out_dim(), "recover: data dimension mismatch");
  require(eps >= 0.0, "recover: eps must be >= 0");

  RecoveryReport rep;
  rep.eps = eps;

  if (method == RecoverMethod::SupportEnum) {
    rep.method = "support-enum";
    int max_size = opts.max_support_size > 0
                       ? opts.max_support_size
                       : std::min(f.in_dim(), f.out_dim());
    auto supports = enumerate_supports(f.in_dim(), max_size, opts.enum_cap);
    const Matrix* lin = f.linear_matrix();
    SupportSolution best;
    std::vector<int> best_support;
    for (const auto& s : supports) {
      SupportSolution sol = lin ? solve_support_linear(*lin, z, eps, s, triple)
                                : solve_support_nonlinear(f, z, eps, s, triple, opts);
      if (sol.feasible && sol.objective < best.objective) {
        best = sol;
        best_support = s;
      }
    }
    if (!best.feasible)
      throw InfeasibleError("recover: no enumerated support admits ||F(x)-z|| <= eps");
    rep.x_star = best.x;
    rep.support = best_support;
    rep.oracle_certified = true;
  } else {
    rep.method = "penalty-continuation";
    Vector x = recover_penalty_path(f, z, eps, triple, opts);
    if ((f(x) - z).norm() > eps + opts.feas_tol) {
      // feasibility restore on the active support
      std::vector<int> sup;
      for (int i = 0; i < f.in_dim(); ++i)
        if (std::abs(x(i)) > 1e-12) sup.push_back(i);
      if (!sup.empty()) {
        Vector u = gauss_newton_feasibility(f, z, sup, opts.gn_max_iter, opts.gn_tol);
        Vector cand = embed(u, sup, f.in_dim());
        if ((f(cand) - z).norm() < (f(x) - z).norm()) x = cand;
      }
      if ((f(x) - z).norm() > eps + opts.feas_tol)
        throw InfeasibleError("recover: penalty continuation found no feasible point");
    }
    rep.x_star = x;
    for (int i = 0; i < f.in_dim(); ++i)
      if (std::abs(x(i)) > 1e-12) rep.support.push_back(i);
    rep.oracle_certified = false;
  }

  rep.m_norm_value = triple.m_norm()(rep.x_star);
  rep.feasibility_residual = (f(rep.x_star) - z).norm();

  if (opts.x_true != nullptr) {
    rep.sigma_x0 = best_approximator(*opts.x_true, triple).distance;
    rep.measured_err_h = triple.h_norm()(rep.x_star - *opts.x_true);
    rep.measured_err_m = triple.m_norm()(rep.x_star - *opts.x_true);
  }
  if (opts.constants != nullptr) {
    const auto& c = *opts.constants;
    rep.constants = {{"D", c.d},       {"beta", c.beta}, {"gamma1", c.gamma1},
                     {"gamma2", c.gamma2}, {"a_A", c.a_a},   {"s_A", c.s_a}};
    rep.provenance = c.provenance;
    double sigma = std::isfinite(rep.sigma_x0) ? rep.sigma_x0 : 0.0;
    rep.bounds = predict_bounds(c.d, c.beta, c.gamma1, c.gamma2, c.a_a, c.s_a, sigma, eps);
    rep.constants["gamma3"] = rep.bounds.gamma3;
  }
  return rep;
}

std::vector<Verdict> verify_axioms(const SparseTriple& triple, const SamplingPlan& plan) {
  std::vector<Verdict> out;
  const int n = triple.n();
  const auto& u = triple.subspaces();

  std::vector<Vector> samples;
  for (int i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e(i) = 1.0;
    samples.push_back(e);
  }
  for (int i = 0; i < plan.n_pts; ++i) {
    auto rng = substream(plan.seed, "axioms", static_cast<std::uint64_t>(i));
    samples.push_back(gauss_vec(rng, n));
  }

  // (i) continuous imbedding: ||x||_H <= ||x||_M and the sup ratio is 1
  {
    double min_gap = std::numeric_limits<double>::infinity();
    double max_ratio = 0.0;
    for (const auto& x : samples) {
      double h = triple.h_norm()(x), m = triple.m_norm()(x);
      if (m <= 0.0) continue;
      min_gap = std::min(min_gap, m - h);
      max_ratio = std::max(max_ratio, h / m);
    }
    bool pass = min_gap >= -1e-12 && max_ratio >= 1.0 - 1e-6 && max_ratio <= 1.0 + 1e-12;
    out.push_back({"(i) imbedding with ||i_M|| = 1", pass, min_gap});
  }

  // (ii) proximinality: structural at finite dimension
  out.push_back({"(ii) proximinality (structural in finite dimension)", true, 0.0});

  // (iii) common best approximator per subspace
  {
    double worst = 0.0;
    int checked = 0;
    for (const auto& x : samples) {
      for (int v = 0; v < u.size() && checked < 4000; ++v, ++checked) {
        Vector trunc = Vector::Zero(n);
        for (int i : u.support(v)) trunc(i) = x(i);
        Vector proj = project(x, u.basis(v));
        worst = std::max(worst, (trunc - proj).lpNorm<Eigen::Infinity>());
      }
    }
    out.push_back({"(iii) M- and H-minimizers coincide per subspace", worst <= 1e-12,
                   1e-12 - worst});
  }

  // (iv) norm splitting in M and squared splitting in H
  {
    double worst = 0.0;
    for (const auto& x : samples) {
      Approximation first = best_approximator(x, triple);
      double m_def = std::abs(triple.m_norm()(x) - triple.m_norm()(first.point) -
                              triple.m_norm()(x - first.point));
      double h = triple.h_norm()(x);
      double h1 = triple.h_norm()(first.point);
      double h2 = triple.h_norm()(x - first.point);
      double h_def = std::abs(h * h - h1 * h1 - h2 * h2);
      worst = std::max({worst, m_def, h_def});
    }
    out.push_back({"(iv) norm splitting identities", worst <= 1e-10, 1e-10 - worst});
  }

  // (v) sparse density surrogate: greedy residual reaches zero
  {
    double worst = 0.0;
    int steps = (n + triple.s() - 1) / triple.s() + 2;
    for (std::size_t i = 0; i < std::min<std::size_t>(samples.size(), 32); ++i) {
      GreedyResult g = greedy(samples[i], triple, steps);
      worst = std::max(worst, g.errors_m.back() /
                                  std::max(1.0, triple.m_norm()(samples[i])));
    }
    out.push_back({"(v) greedy density surrogate", worst <= 1e-12, 1e-12 - worst});
  }
  return out;
}

}  // namespace nlframe
