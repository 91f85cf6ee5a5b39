#include <CLI11.hpp>
#include <iostream>

#include "nlframe/certify.hpp"
#include "nlframe/config.hpp"
#include "nlframe/io.hpp"
#include "nlframe/run.hpp"
#include "nlframe/solvers.hpp"
#include "nlframe/sparse.hpp"

namespace {

using namespace nlframe;

// inline JSON string or a path to a .json/.toml file
nlohmann::json load_spec_arg(const std::string& arg) {
  std::string trimmed = arg;
  auto b = trimmed.find_first_not_of(" \t");
  if (b != std::string::npos && trimmed[b] == '{') return nlohmann::json::parse(trimmed);
  return load_config_file(arg);
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const InvalidInput& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return 2;
  } catch (const ResourceLimit& e) {
    std::cerr << "error (resource limit): " << e.what() << "\n";
    return 2;
  } catch (const CertificateRefused& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 3;
  } catch (const DivergenceError& e) {
    std::cerr << "error (divergence): " << e.what() << "\n";
    return 4;
  } catch (const InfeasibleError& e) {
    std::cerr << "error (infeasible): " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

SamplingPlan plan_from_arg(const std::string& arg, int threads) {
  SamplingPlan plan;
  if (!arg.empty()) plan = SamplingPlan::from_json(load_spec_arg(arg));
  if (const char* env = std::getenv("NLFRAME_SEED"))
    plan.seed = std::strtoull(env, nullptr, 10);
  plan.threads = threads;
  return plan;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonlinear-frame reconstruction and certification toolkit"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads for sample evaluation");

  // ---- certify ----
  auto* cert = app.add_subcommand("certify", "estimate stability constants for (F, T)");
  std::string c_map, c_operator, c_plan, c_out;
  double c_norm_p = 2.0;
  bool c_alpha = true;
  cert->add_option("--map", c_map, "map spec (inline JSON or file)")->required();
  cert->add_option("--operator", c_operator, "operator matrix file (csv/json)")->required();
  cert->add_option("--plan", c_plan, "sampling plan (inline JSON or file)");
  cert->add_option("--out", c_out, "report JSON path")->required();
  cert->add_option("--norm-p", c_norm_p, "output p-norm (default 2)");
  cert->add_flag("--alpha,!--no-alpha", c_alpha, "include alpha_F");

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "run an iterative reconstruction");
  std::string s_algo, s_map, s_operator, s_data, s_out, s_trace, s_plan;
  double s_mu = 0.0, s_tol = 1e-12;
  int s_max_iter = 20000;
  bool s_force = false;
  solve->add_option("--algo", s_algo, "left-inverse|van-cittert|localized")->required();
  solve->add_option("--map", s_map, "map spec")->required();
  solve->add_option("--operator", s_operator, "operator matrix file")->required();
  solve->add_option("--data", s_data, "observation vector file")->required();
  solve->add_option("--mu", s_mu, "relaxation factor")->required();
  solve->add_option("--out", s_out, "report JSON path")->required();
  solve->add_option("--trace", s_trace, "trace CSV path");
  solve->add_option("--plan", s_plan, "sampling plan for the certificates");
  solve->add_option("--tol", s_tol, "stopping tolerance");
  solve->add_option("--max-iter", s_max_iter, "iteration cap");
  solve->add_flag("--force", s_force, "run even when certificates fail");

  // ---- recover ----
  auto* rec = app.add_subcommand("recover", "constrained M-norm sparse recovery");
  std::string r_map, r_operator, r_triple, r_data, r_out, r_method = "enum";
  double r_eps = 0.0;
  rec->add_option("--map", r_map, "map spec (defaults to linear operator)");
  rec->add_option("--operator", r_operator, "operator matrix file");
  rec->add_option("--triple", r_triple, "e.g. classical:n=12,s=2")->required();
  rec->add_option("--data", r_data, "observation vector file")->required();
  rec->add_option("--eps", r_eps, "noise level")->required();
  rec->add_option("--method", r_method, "enum|penalty");
  rec->add_option("--out", r_out, "report JSON path")->required();

  // ---- triple ----
  auto* triple_cmd = app.add_subcommand("triple", "sparse approximation triples");
  auto* triple_verify = triple_cmd->add_subcommand("verify", "check axioms (i)-(v)");
  std::string t_triple, t_plan, t_out;
  triple_verify->add_option("--triple", t_triple, "triple spec")->required();
  triple_verify->add_option("--plan", t_plan, "sampling plan");
  triple_verify->add_option("--out", t_out, "verdict JSON path");

  // ---- run ----
  auto* run_cmd = app.add_subcommand("run", "run an experiment config (toml/json)");
  std::string run_config;
  run_cmd->add_option("--config", run_config, "config file")->required();

  // ---- report ----
  auto* report_cmd = app.add_subcommand("report", "re-emit a report in another format");
  std::string rp_in, rp_format = "md-table", rp_out;
  report_cmd->add_option("--in", rp_in, "report JSON path")->required();
  report_cmd->add_option("--format", rp_format, "json|csv|md-table");
  report_cmd->add_option("--out", rp_out, "output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  if (cert->parsed()) {
    return run_guarded([&] {
      DenseOperator t(read_matrix_any(c_operator));
      DifferentiableMap f = map_from_spec(load_spec_arg(c_map), &t);
      SamplingPlan plan = plan_from_arg(c_plan, threads);
      NormSpec out_norm = std::isinf(c_norm_p) ? NormSpec::linf() : NormSpec::lp(c_norm_p);
      CertificationReport rep = certify_catalog(f, t, plan, out_norm, c_alpha);
      write_json(c_out, rep.to_json());
      std::cout << "wrote " << c_out << "\n";
    });
  }
  if (solve->parsed()) {
    return run_guarded([&] {
      DenseOperator t(read_matrix_any(s_operator));
      DifferentiableMap f = map_from_spec(load_spec_arg(s_map), &t);
      Vector z = read_vector_any(s_data);
      SamplingPlan plan = plan_from_arg(s_plan, threads);
      OperatorConstants constants = certify_pair(f, t, plan);
      SolverConfig cfg;
      cfg.mu = s_mu;
      cfg.tol = s_tol;
      cfg.max_iter = s_max_iter;
      cfg.force = s_force;
      SolverReport rep;
      if (s_algo == "left-inverse")
        rep = left_inverse_iteration(f, t, t.left_inverse(), z, cfg, constants);
      else if (s_algo == "van-cittert")
        rep = van_cittert_iteration(f, t, z, cfg, constants);
      else if (s_algo == "localized")
        rep = localized_iteration(f, t, z, cfg, constants, plan);
      else
        throw InvalidInput("unknown algo '" + s_algo + "'");
      write_json(s_out, rep.to_json());
      if (!s_trace.empty()) write_trace_csv(s_trace, rep);
      std::cout << "wrote " << s_out << "\n";
    });
  }
  if (rec->parsed()) {
    return run_guarded([&] {
      SparseTriple triple = SparseTriple::from_string(r_triple);
      std::optional<DenseOperator> t;
      if (!r_operator.empty()) t.emplace(read_matrix_any(r_operator));
      DifferentiableMap f =
          r_map.empty()
              ? linear_map(t ? *t : DenseOperator(Matrix::Identity(triple.n(), triple.n())))
              : map_from_spec(load_spec_arg(r_map), t ? &*t : nullptr);
      Vector z = read_vector_any(r_data);
      RecoverMethod method =
          r_method == "penalty" ? RecoverMethod::Penalty : RecoverMethod::SupportEnum;
      RecoveryReport rep = recover(f, z, r_eps, triple, method);
      write_json(r_out, rep.to_json());
      std::cout << "wrote " << r_out << "\n";
    });
  }
  if (triple_verify->parsed()) {
    return run_guarded([&] {
      SparseTriple triple = SparseTriple::from_string(t_triple);
      SamplingPlan plan = plan_from_arg(t_plan, threads);
      auto verdicts = verify_axioms(triple, plan);
      nlohmann::json j{{"kind", "triple-verification"}, {"triple", triple.describe()}};
      j["verdicts"] = nlohmann::json::array();
      bool all = true;
      for (const auto& v : verdicts) {
        j["verdicts"].push_back(v.to_json());
        std::cout << (v.pass ? "pass" : "FAIL") << "  " << v.condition << "\n";
        all = all && v.pass;
      }
      if (!t_out.empty()) write_json(t_out, j);
      if (!all) throw InvalidInput("triple verification failed");
    });
  }
  if (run_cmd->parsed()) {
    return run_guarded([&] {
      ExperimentConfig cfg = ExperimentConfig::from_json(load_config_file(run_config));
      cfg.threads = threads;
      std::string base =
          std::filesystem::path(run_config).has_parent_path()
              ? std::filesystem::path(run_config).parent_path().string()
              : std::string();
      RunManifest manifest = run_experiment(cfg, base);
      std::string manifest_path =
          (std::filesystem::path(manifest.artifacts.front()).parent_path() /
           "manifest.json")
              .string();
      write_json(manifest_path, manifest.to_json());
      for (const auto& a : manifest.artifacts) std::cout << "wrote " << a << "\n";
      std::cout << "wrote " << manifest_path << "\n";
    });
  }
  if (report_cmd->parsed()) {
    return run_guarded([&] {
      nlohmann::json rep = nlohmann::json::parse(read_text(rp_in));
      std::string out = emit_report(rep, rp_format);
      if (rp_out.empty())
        std::cout << out;
      else
        write_text(rp_out, out);
    });
  }
  return 0;
}
