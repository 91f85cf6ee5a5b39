#include "nlframe/run.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "nlframe/certify.hpp"
#include "nlframe/io.hpp"
#include "nlframe/solvers.hpp"
#include "nlframe/sparse.hpp"

namespace nlframe {

namespace {

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty() || base.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base) / p).string();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

NormSpec norm_from_name(const std::string& name) {
  if (name == "l2") return NormSpec::l2();
  if (name == "l1") return NormSpec::l1();
  if (name == "linf") return NormSpec::linf();
  throw InvalidInput("unknown norm '" + name + "' (expected l1|l2|linf)");
}

}  // namespace

DenseOperator operator_from_spec(const nlohmann::json& spec, const std::string& base_dir) {
  require(spec.is_object(), "[operator]: expected a table");
  std::string kind = spec.value("kind", std::string("file"));
  if (kind == "file") {
    require(spec.contains("path"), "[operator] kind=file requires 'path'");
    return DenseOperator(read_matrix_any(resolve(base_dir, spec["path"].get<std::string>())));
  }
  if (kind == "matrix") {
    require(spec.contains("data"), "[operator] kind=matrix requires 'data'");
    auto rows = spec["data"].get<std::vector<std::vector<double>>>();
    require(!rows.empty() && !rows.front().empty(), "[operator]: empty matrix literal");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(rows[i].size() == rows.front().size(), "[operator]: ragged matrix literal");
      for (std::size_t j = 0; j < rows[i].size(); ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return DenseOperator(std::move(m));
  }
  if (kind == "seeded_gaussian") {
    int rows = spec.at("rows").get<int>();
    int cols = spec.at("cols").get<int>();
    double scale = spec.value("scale", 1.0 / std::sqrt(static_cast<double>(rows)));
    std::uint64_t seed = spec.value("seed", 0ULL);
    return DenseOperator(seeded_gaussian(rows, cols, seed, scale));
  }
  if (kind == "seeded_orthogonal_diag") {
    // Q diag(d) with Q a seeded rotation: well-conditioned test operators
    int n = spec.at("n").get<int>();
    auto diag = spec.at("diag").get<std::vector<double>>();
    require(static_cast<int>(diag.size()) == n, "[operator]: diag length != n");
    Matrix q = seeded_orthogonal(n, spec.value("seed", 0ULL));
    Vector d = Eigen::Map<Vector>(diag.data(), n);
    return DenseOperator(q * d.asDiagonal());
  }
  throw InvalidInput("[operator]: unknown kind '" + kind + "'");
}

Vector signal_from_spec(const nlohmann::json& spec, int dim, std::uint64_t seed) {
  require(spec.is_object(), "[signal]: expected a table");
  std::string kind = spec.value("kind", std::string("inline"));
  if (kind == "inline") {
    auto data = spec.at("data").get<std::vector<double>>();
    require(static_cast<int>(data.size()) == dim, "[signal]: data length mismatch");
    return Eigen::Map<Vector>(data.data(), dim);
  }
  if (kind == "seeded_sparse") {
    int sparsity = spec.at("sparsity").get<int>();
    require(sparsity >= 1 && sparsity <= dim, "[signal]: bad sparsity");
    double scale = spec.value("scale", 1.0);
    auto rng = substream(spec.value("seed", seed), "signal");
    std::vector<int> idx(static_cast<std::size_t>(dim));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < sparsity; ++i) {
      std::uniform_int_distribution<int> pick(i, dim - 1);
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    std::normal_distribution<double> dist(0.0, 1.0);
    Vector x = Vector::Zero(dim);
    for (int i = 0; i < sparsity; ++i) x(idx[static_cast<std::size_t>(i)]) = scale * dist(rng);
    return x;
  }
  if (kind == "seeded_dense") {
    double scale = spec.value("scale", 1.0);
    auto rng = substream(spec.value("seed", seed), "signal");
    std::normal_distribution<double> dist(0.0, 1.0);
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x(i) = scale * dist(rng);
    return x;
  }
  throw InvalidInput("[signal]: unknown kind '" + kind + "'");
}

Vector noise_from_spec(const nlohmann::json& spec, int dim, std::uint64_t seed) {
  if (spec.is_null()) return Vector::Zero(dim);
  double magnitude = spec.value("magnitude", 0.0);
  if (magnitude == 0.0) return Vector::Zero(dim);
  std::string norm = spec.value("norm", std::string("l2"));
  auto rng = substream(spec.value("seed", seed), "noise");
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector e(dim);
  for (int i = 0; i < dim; ++i) e(i) = dist(rng);
  NormSpec ns = norm_from_name(norm);
  double n = ns(e);
  require(n > 0.0, "[noise]: degenerate draw");
  return (magnitude / n) * e;
}

namespace {

nlohmann::json certify_report_json(const ExperimentConfig& cfg, const DenseOperator& t,
                                   const DifferentiableMap& f, const SamplingPlan& plan) {
  double p = cfg.certify.value("out_norm_p", 2.0);
  NormSpec out_norm = std::isinf(p) ? NormSpec::linf() : NormSpec::lp(p);
  bool with_alpha = cfg.certify.value("with_alpha", true);
  CertificationReport rep = certify_catalog(f, t, plan, out_norm, with_alpha);
  if (cfg.certify.contains("gamma_ks")) {
    SparseTriple triple = SparseTriple::from_string(cfg.triple_spec);
    for (int k : cfg.certify["gamma_ks"].get<std::vector<int>>())
      rep.constants.push_back(
          gamma_kA(f, t, triple.subspaces(), k, plan, triple.m_norm()));
  }
  if (cfg.certify.value("rip_k", 0) > 0) {
    SparseTriple triple = SparseTriple::from_string(cfg.triple_spec);
    double delta = rip_delta(t, triple.subspaces(), cfg.certify["rip_k"].get<int>());
    rep.constants.push_back({"rip_delta", delta, "exact", {}, plan, std::nullopt});
  }
  return rep.to_json();
}

std::string summary_md(const nlohmann::json& report) {
  std::ostringstream os;
  os << "# nlframe summary\n\n";
  if (report.contains("constants")) {
    os << "| constant | estimate | provenance |\n|---|---|---|\n";
    for (const auto& c : report["constants"])
      os << "| " << c.value("name", "") << " | " << std::setprecision(12)
         << c.value("estimate", 0.0) << " | " << c.value("provenance", "") << " |\n";
    os << "\n";
  }
  if (report.contains("verdicts")) {
    os << "| condition | verdict | margin |\n|---|---|---|\n";
    for (const auto& v : report["verdicts"])
      os << "| " << v.value("condition", "") << " | "
         << (v.value("pass", false) ? "pass" : "FAIL") << " | " << std::setprecision(6)
         << v.value("margin", 0.0) << " |\n";
    os << "\n";
  }
  for (const char* key : {"predicted", "measured_err_h", "measured_err_m", "m_norm",
                          "iterations", "converged", "consistency_residual"}) {
    if (report.contains(key)) os << "- " << key << ": " << report[key].dump() << "\n";
  }
  return os.str();
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg, const std::string& base_dir) {
  auto t_start = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.config_hash_hex = hex64(config_hash(cfg.raw));

  std::uint64_t seed = cfg.seed;
  if (const char* env = std::getenv("NLFRAME_SEED")) seed = std::strtoull(env, nullptr, 10);
  manifest.seed = seed;

  SamplingPlan plan = SamplingPlan::from_json(cfg.plan);
  if (!cfg.plan.contains("seed")) plan.seed = seed;
  plan.threads = cfg.threads;

  nlohmann::json report;

  if (cfg.mode == "certify") {
    DenseOperator t = operator_from_spec(cfg.operator_spec, base_dir);
    DifferentiableMap f = map_from_spec(cfg.map_spec, &t);
    report = certify_report_json(cfg, t, f, plan);
  } else if (cfg.mode == "solve") {
    DenseOperator t = operator_from_spec(cfg.operator_spec, base_dir);
    DifferentiableMap f = map_from_spec(cfg.map_spec, &t);
    Vector x0;
    Vector z;
    if (cfg.raw.contains("data")) {
      z = read_vector_any(resolve(base_dir, cfg.raw["data"].get<std::string>()));
    } else {
      x0 = signal_from_spec(cfg.signal, f.in_dim(), seed);
      z = f(x0) + noise_from_spec(cfg.noise, f.out_dim(), seed);
    }
    OperatorConstants constants = certify_pair(f, t, plan);
    SolverConfig scfg;
    scfg.mu = cfg.solver.at("mu").get<double>();
    scfg.tol = cfg.solver.value("tol", 1e-12);
    scfg.max_iter = cfg.solver.value("max_iter", 20000);
    scfg.force = cfg.solver.value("force", false);
    std::string algo = cfg.solver.at("algo").get<std::string>();
    SolverReport srep;
    if (algo == "left-inverse") {
      srep = left_inverse_iteration(f, t, t.left_inverse(), z, scfg, constants);
    } else if (algo == "van-cittert") {
      srep = van_cittert_iteration(f, t, z, scfg, constants);
    } else if (algo == "localized") {
      srep = localized_iteration(f, t, z, scfg, constants, plan);
    } else {
      throw InvalidInput("[solver]: unknown algo '" + algo + "'");
    }
    report = srep.to_json();
    if (x0.size() > 0) {
      report["true_error_l2"] = (srep.final_point - x0).norm();
      report["true_error_linf"] = (srep.final_point - x0).lpNorm<Eigen::Infinity>();
    }
    if (!cfg.out_trace.empty()) {
      std::string trace_path = resolve(base_dir, cfg.out_trace);
      write_trace_csv(trace_path, srep, x0.size() ? &x0 : nullptr);
      manifest.artifacts.push_back(trace_path);
    }
  } else if (cfg.mode == "recover") {
    SparseTriple triple = SparseTriple::from_string(cfg.triple_spec);
    DenseOperator t = cfg.operator_spec.is_null()
                          ? DenseOperator(Matrix::Identity(triple.n(), triple.n()))
                          : operator_from_spec(cfg.operator_spec, base_dir);
    DifferentiableMap f = cfg.map_spec.is_null() ? linear_map(t)
                                                 : map_from_spec(cfg.map_spec, &t);
    Vector x0;
    Vector z;
    if (cfg.raw.contains("data")) {
      z = read_vector_any(resolve(base_dir, cfg.raw["data"].get<std::string>()));
    } else {
      x0 = signal_from_spec(cfg.signal, f.in_dim(), seed);
      z = f(x0) + noise_from_spec(cfg.noise, f.out_dim(), seed);
    }
    double eps = cfg.recover.at("eps").get<double>();
    std::string method_name = cfg.recover.value("method", std::string("enum"));
    RecoverMethod method = method_name == "penalty" ? RecoverMethod::Penalty
                                                    : RecoverMethod::SupportEnum;
    RecoverOptions opts;
    opts.seed = seed;
    if (x0.size() > 0) opts.x_true = &x0;

    TheoremConstants tc;
    bool with_pipeline = cfg.recover.value("pipeline", false);
    if (with_pipeline) {
      // Thm 5.1/5.2 route: RIP + linearization errors compose into (D, beta,
      // gamma1, gamma2); refusal surfaces as CertificateRefused (exit 3)
      double d2 = rip_delta(t, triple.subspaces(), 2);
      double d4 = rip_delta(t, triple.subspaces(), 4);
      ConstantEstimate g2 = gamma_kA(f, t, triple.subspaces(), 2, plan, triple.m_norm());
      ConstantEstimate g4 = gamma_kA(f, t, triple.subspaces(), 4, plan, triple.m_norm());
      SparseRieszConstants sr = sparse_riesz_constants(d2, g2.value);
      AlmostLinearConstants al = almost_linear_constants(g2.value, g4.value);
      tc.d = sr.d;
      tc.beta = sr.beta;
      tc.gamma1 = al.gamma1;
      tc.gamma2 = al.gamma2;
      tc.a_a = a_A(triple, plan);
      tc.s_a = s_A(triple, plan);
      tc.provenance = {{"D", "formula(rip_delta, gamma_2A)"},
                       {"beta", "formula(rip_delta, gamma_2A)"},
                       {"gamma1", "formula(gamma_4A)"},
                       {"gamma2", "formula(gamma_2A, gamma_4A)"},
                       {"a_A", "sampled-lower-bound"},
                       {"s_A", triple.kind() == SparseTriple::Kind::Classical
                                   ? "exact"
                                   : "sampled-lower-bound"},
                       {"delta_2A", std::to_string(d2)},
                       {"delta_4A", std::to_string(d4)}};
      double g3 = recovery_condition(tc.d, tc.beta, tc.gamma1, tc.gamma2, tc.a_a, tc.s_a);
      if (!(g3 > 0.0))
        throw CertificateRefused("recovery pipeline: gamma3 = " + std::to_string(g3) +
                                 " <= 0; error bounds inapplicable");
      opts.constants = &tc;
    } else if (cfg.recover.contains("constants")) {
      const auto& cj = cfg.recover["constants"];
      tc.d = cj.value("D", 1.0);
      tc.beta = cj.value("beta", 0.0);
      tc.gamma1 = cj.value("gamma1", 0.0);
      tc.gamma2 = cj.value("gamma2", 0.0);
      tc.a_a = cj.value("a_A", 1.0);
      tc.s_a = cj.value("s_A", 1.0);
      tc.provenance["source"] = "config";
      opts.constants = &tc;
    }
    RecoveryReport rrep = recover(f, z, eps, triple, method, opts);
    report = rrep.to_json();
  } else if (cfg.mode == "triple") {
    SparseTriple triple = SparseTriple::from_string(cfg.triple_spec);
    auto verdicts = verify_axioms(triple, plan);
    report = {{"kind", "triple-verification"},
              {"tool", "nlframe"},
              {"version", kVersion},
              {"triple", triple.describe()}};
    report["verdicts"] = nlohmann::json::array();
    for (const auto& v : verdicts) report["verdicts"].push_back(v.to_json());
    report["constants"] = nlohmann::json::array();
    report["constants"].push_back(
        nlohmann::json{{"name", "s_A"},
                       {"estimate", s_A(triple, plan)},
                       {"provenance",
                        triple.kind() == SparseTriple::Kind::Classical
                            ? "exact"
                            : "sampled-lower-bound"}});
    report["constants"].push_back(nlohmann::json{{"name", "a_A"},
                                                 {"estimate", a_A(triple, plan)},
                                                 {"provenance", "sampled-lower-bound"}});
  }

  std::string report_path = resolve(base_dir, cfg.out_report);
  write_json(report_path, report);
  manifest.artifacts.push_back(report_path);

  if (!cfg.out_summary.empty()) {
    std::string path = resolve(base_dir, cfg.out_summary);
    write_text(path, summary_md(report));
    manifest.artifacts.push_back(path);
  }

  manifest.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t_start)
                         .count();
  return manifest;
}

std::string emit_report(const nlohmann::json& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  if (format == "md-table") return summary_md(report);
  if (format == "csv") {
    std::ostringstream os;
    os << std::setprecision(17);
    if (report.contains("constants")) {
      os << "name,estimate,provenance\n";
      for (const auto& c : report["constants"])
        os << c.value("name", "") << ',' << c.value("estimate", 0.0) << ','
           << c.value("provenance", "") << '\n';
    } else if (report.contains("residuals")) {
      os << "iter,residual,ratio\n";
      const auto& res = report["residuals"];
      const auto& rat = report["ratios"];
      for (std::size_t n = 0; n < res.size(); ++n) {
        os << (n + 1) << ',' << res[n].get<double>() << ',';
        if (n >= 1) os << rat[n - 1].get<double>();
        os << '\n';
      }
    } else {
      os << "key,value\n";
      for (auto it = report.begin(); it != report.end(); ++it)
        if (it->is_primitive()) os << it.key() << ',' << it->dump() << '\n';
    }
    return os.str();
  }
  throw InvalidInput("emit_report: unknown format '" + format + "' (json|csv|md-table)");
}

}  // namespace nlframe
