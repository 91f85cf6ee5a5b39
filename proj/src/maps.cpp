#include "nlframe/maps.hpp"

#include <cmath>

namespace nlframe {

DifferentiableMap::DifferentiableMap(std::string name, int in_dim, int out_dim,
                                     EvalFn eval, JacFn jac, bool zero_normalized)
    : name_(std::move(name)),
      in_dim_(in_dim),
      out_dim_(out_dim),
      eval_(std::move(eval)),
      jac_(std::move(jac)),
      zero_normalized_(zero_normalized) {
  require(in_dim_ >= 1 && out_dim_ >= 1, "DifferentiableMap: bad dimensions");
  require(static_cast<bool>(eval_), "DifferentiableMap: missing evaluation callable");
}

Vector DifferentiableMap::operator()(const Vector& x) const {
  require(x.size() == in_dim_, name_ + ": input dimension mismatch");
  Vector y = eval_(x);
  require(y.size() == out_dim_, name_ + ": evaluation returned wrong dimension");
  return y;
}

Matrix DifferentiableMap::jacobian(const Vector& x) const {
  require(x.size() == in_dim_, name_ + ": input dimension mismatch");
  if (jac_) {
    Matrix j = jac_(x);
    require(j.rows() == out_dim_ && j.cols() == in_dim_,
            name_ + ": jacobian has wrong shape");
    return j;
  }
  return fd_jacobian(*this, x, fd_default_step(x));
}

double fd_default_step(const Vector& x) {
  return std::max(1e-6, 1e-6 * x.lpNorm<Eigen::Infinity>());
}

Matrix fd_jacobian(const DifferentiableMap& f, const Vector& x, double h) {
  require(h > 0.0, "fd_jacobian: step must be positive");
  Matrix j(f.out_dim(), f.in_dim());
  Vector xp = x, xm = x;
  for (int c = 0; c < f.in_dim(); ++c) {
    xp(c) += h;
    xm(c) -= h;
    j.col(c) = (f(xp) - f(xm)) / (2.0 * h);
    xp(c) = x(c);
    xm(c) = x(c);
  }
  return j;
}

Nonlinearity nonlinearity_from_string(const std::string& s) {
  if (s == "sin") return Nonlinearity::Sin;
  if (s == "tanh") return Nonlinearity::Tanh;
  throw InvalidInput("unknown nonlinearity '" + s + "' (expected sin|tanh)");
}

DifferentiableMap e_map(double eps) {
  require(eps >= 0.0 && eps < M_PI / 4.0, "e_map: eps must lie in [0, pi/4)");
  const double seam = M_PI / 2.0 + eps;
  const double ce = std::cos(eps), se = std::sin(eps);
  auto eval = [=](const Vector& x) {
    const double t = x(0);
    Vector y(2);
    if (t < -seam) {
      y(0) = -ce - se * (t + seam);
      y(1) = se - ce * (t + seam);
    } else if (t <= seam) {
      y(0) = std::sin(t);
      y(1) = -std::cos(t);
    } else {
      y(0) = ce - se * (t - seam);
      y(1) = se + ce * (t - seam);
    }
    return y;
  };
  auto jac = [=](const Vector& x) {
    const double t = x(0);
    Matrix j(2, 1);
    if (t < -seam) {
      j(0, 0) = -se;
      j(1, 0) = -ce;
    } else if (t <= seam) {
      j(0, 0) = std::cos(t);
      j(1, 0) = std::sin(t);
    } else {
      j(0, 0) = -se;
      j(1, 0) = ce;
    }
    return j;
  };
  return DifferentiableMap("e_map", 1, 2, eval, jac, false);
}

DifferentiableMap linear_map(const DenseOperator& t) {
  Matrix m = t.matrix();
  auto eval = [m](const Vector& x) { return Vector(m * x); };
  auto jac = [m](const Vector&) { return m; };
  DifferentiableMap f("linear", static_cast<int>(m.cols()),
                      static_cast<int>(m.rows()), eval, jac, true);
  f.mark_linear(m);
  return f;
}

DifferentiableMap perturbed_linear(const DenseOperator& t, double eta,
                                   Nonlinearity g) {
  require(eta >= 0.0, "perturbed_linear: eta must be >= 0");
  Matrix m = t.matrix();
  const bool is_sin = (g == Nonlinearity::Sin);
  auto eval = [m, eta, is_sin](const Vector& x) {
    Vector tx = m * x;
    Vector gx = is_sin ? Vector(tx.array().sin()) : Vector(tx.array().tanh());
    return Vector(tx + eta * gx);
  };
  auto jac = [m, eta, is_sin](const Vector& x) {
    Vector tx = m * x;
    Vector dg = is_sin ? Vector(tx.array().cos())
                       : Vector(1.0 - tx.array().tanh().square());
    return Matrix((Vector::Ones(tx.size()) + eta * dg).asDiagonal() * m);
  };
  return DifferentiableMap(is_sin ? "perturbed_linear_sin" : "perturbed_linear_tanh",
                           static_cast<int>(m.cols()), static_cast<int>(m.rows()),
                           eval, jac, true);
}

ScalarFunction scalar_identity() {
  return {"identity", [](double t) { return t; }, [](double) { return 1.0; }};
}

ScalarFunction scalar_cubic(double c) {
  return {"cubic(" + std::to_string(c) + ")",
          [c](double t) { return t + c * t * t * t; },
          [c](double t) { return 1.0 + 3.0 * c * t * t; }};
}

std::pair<DifferentiableMap, DenseOperator> companding_map(const Matrix& phi,
                                                           const Matrix& psi,
                                                           const ScalarFunction& f) {
  require(phi.cols() == psi.cols(), "companding_map: Phi and Psi need equal atom length");
  const int n = static_cast<int>(phi.rows());
  const int m = static_cast<int>(psi.rows());
  require(std::abs(f.f(0.0)) == 0.0, "companding_map: scalar function must vanish at 0");

  Matrix a_pp = psi * psi.transpose();             // A_{Psi,Psi}, m x m
  Matrix a_fp = phi * psi.transpose();             // A_{Phi,Psi}, n x m
  Matrix a_pf = psi * phi.transpose();             // A_{Psi,Phi}, m x n
  Matrix a_ff = phi * phi.transpose();             // A_{Phi,Phi}, n x n

  auto cond_of = [](const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return svd.singularValues()(0) / smin;
  };
  double cond_pp = cond_of(a_pp);
  if (!(cond_pp < 1e8))
    throw InvalidInput("companding_map: A_{Psi,Psi} ill conditioned (cond = " +
                       std::to_string(cond_pp) + ")");
  Matrix app_inv = a_pp.ldlt().solve(Matrix::Identity(m, m));
  Matrix gram = a_fp * app_inv * a_pf;             // n x n
  double cond_g = cond_of(gram);
  if (!(cond_g < 1e8))
    throw InvalidInput("companding_map: inner Gram product ill conditioned (cond = " +
                       std::to_string(cond_g) + ")");
  Matrix t_col = app_inv * a_pf * gram.ldlt().solve(a_ff);  // m x n

  Matrix phi_t = phi.transpose();
  auto feval = f.f;
  auto fderiv = f.df;
  auto eval = [psi, phi_t, feval](const Vector& x) {
    Vector h = phi_t * x;
    for (Eigen::Index i = 0; i < h.size(); ++i) h(i) = feval(h(i));
    return Vector(psi * h);
  };
  auto jac = [psi, phi_t, fderiv](const Vector& x) {
    Vector h = phi_t * x;
    for (Eigen::Index i = 0; i < h.size(); ++i) h(i) = fderiv(h(i));
    return Matrix(psi * h.asDiagonal() * phi_t);
  };
  DifferentiableMap map("companding[" + f.name + "]", n, m, eval, jac, true);
  return {std::move(map), DenseOperator(std::move(t_col))};
}

MapCatalogEntry e_map_entry(double p, double eps) {
  MapCatalogEntry entry{"e_map(p=" + std::to_string(p) + ",eps=" + std::to_string(eps) + ")",
                        e_map(eps),
                        NormSpec::lp(p),
                        {}};
  entry.documented_constants["stability_lower"] = {std::sqrt(2.0) / 2.0,
                                                   "analytic envelope"};
  entry.documented_constants["stability_upper"] = {2.0, "analytic envelope"};
  if (p == 2.0 && eps == 0.0)
    entry.documented_constants["beta_vs_T1"] = {std::sqrt(2.0),
                                                "analytic value, witness |t| = pi/2"};
  if (std::isinf(p) && eps == 0.0)
    entry.documented_constants["alpha"] = {1.0, "analytic value, center (1,0)"};
  return entry;
}

Matrix seeded_gaussian(int rows, int cols, std::uint64_t seed, double scale) {
  require(rows >= 1 && cols >= 1, "seeded_gaussian: bad shape");
  auto rng = substream(seed, "gaussian");
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * dist(rng);
  return m;
}

Matrix seeded_orthogonal(int n, std::uint64_t seed) {
  Matrix g = seeded_gaussian(n, n, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;  // sign-fix for determinism
  return q;
}

Matrix seeded_contraction(int n, double spectral_norm, double min_linf_norm,
                          std::uint64_t seed) {
  require(spectral_norm > 0.0, "seeded_contraction: spectral norm must be positive");
  for (std::uint64_t trial = 0; trial < 64; ++trial) {
    Matrix q = spectral_norm * seeded_orthogonal(n, mix64(seed + trial));
    double linf = q.cwiseAbs().rowwise().sum().maxCoeff();
    if (linf >= min_linf_norm) return q;
  }
  throw InvalidInput("seeded_contraction: no trial reached the requested linf norm");
}

DifferentiableMap map_from_spec(const nlohmann::json& spec, const DenseOperator* t) {
  require(spec.contains("kind"), "map spec: missing 'kind'");
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "e_map") {
    return e_map(spec.value("eps", 0.0));
  }
  if (kind == "linear") {
    require(t != nullptr, "map spec 'linear' requires an operator");
    return linear_map(*t);
  }
  if (kind == "perturbed_linear") {
    require(t != nullptr, "map spec 'perturbed_linear' requires an operator");
    double eta = spec.value("eta", 0.0);
    Nonlinearity g = nonlinearity_from_string(spec.value("g", std::string("sin")));
    return perturbed_linear(*t, eta, g);
  }
  if (kind == "companding") {
    const int n = spec.at("n").get<int>();
    const int m = spec.at("m").get<int>();
    const int length = spec.at("L").get<int>();
    const std::uint64_t seed = spec.value("seed", 0ULL);
    Matrix phi = seeded_gaussian(n, length, mix64(seed ^ 0x5068ULL), 1.0 / std::sqrt(length));
    Matrix psi = seeded_gaussian(m, length, mix64(seed ^ 0x5073ULL), 1.0 / std::sqrt(length));
    ScalarFunction f = scalar_identity();
    if (spec.contains("f") && spec.at("f").get<std::string>() == "cubic")
      f = scalar_cubic(spec.value("c", 0.01));
    return companding_map(phi, psi, f).first;
  }
  throw InvalidInput("map spec: unknown kind '" + kind + "'");
}

}  // namespace nlframe
