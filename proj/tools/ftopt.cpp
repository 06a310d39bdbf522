#include "ftopt/errors.hpp"
#include "ftopt/harness/experiments.hpp"
#include "ftopt/harness/generate.hpp"
#include "ftopt/harness/reference.hpp"
#include "ftopt/problem_io.hpp"
#include "ftopt/solver.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ftopt;

namespace {

constexpr int kExitOptimal = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIndeterminate = 3;

std::string vec(const VectorXd& v) {
  std::string out = "[";
  char buf[32];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.10g", i ? ", " : "", v[i]);
    out += buf;
  }
  return out + "]";
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

Family family_or_throw(const std::string& name) {
  auto f = harness::parse_family(name);
  if (!f) throw Error("unknown family '" + name + "'");
  return *f;
}

int run_solve(const std::string& file, double tp, double mu, double init_scale,
              const std::string& traj) {
  const ConvexProgram program = load_problem_file(file);
  SolverConfig cfg;
  cfg.T_p = tp;
  cfg.mu = mu;
  cfg.init_scale = init_scale;
  cfg.record_trajectory = !traj.empty();
  const SolveReport r = solve(program, cfg);

  std::printf("outcome: %s\n", std::string(to_string(r.outcome.kind)).c_str());
  if (r.outcome.solution) {
    std::printf("x*: %s\n", vec(r.outcome.solution->x).c_str());
    std::printf("y*: %s\n", vec(r.outcome.solution->y).c_str());
  }
  if (r.outcome.certificate) {
    std::printf("certificate x_bar: %s\n", vec(r.outcome.certificate->x_bar).c_str());
    std::printf("certificate s_bar: %s\n", vec(r.outcome.certificate->s_bar).c_str());
  }
  std::printf("tau: %.6e\nkappa: %.6e\n||z||: %.6e\n", r.tau, r.kappa, r.z_norm);
  if (r.kkt) {
    std::printf("kkt: stationarity %.3e  feasibility %.3e  complementarity %.3e\n",
                r.kkt->stationarity, r.kkt->feasibility, r.kkt->complementarity);
  }
  if (r.settle_time) std::printf("settled at t = %.9f (T_p = %g)\n", *r.settle_time, tp);
  if (!r.diagnostics.empty()) std::printf("note: %s\n", r.diagnostics.c_str());
  if (!traj.empty()) {
    auto out = open_out(traj);
    harness::write_trajectory_csv(out, *r.trajectory, program.n(), program.m());
  }
  switch (r.outcome.kind) {
    case OutcomeKind::Optimal:
      return kExitOptimal;
    case OutcomeKind::Infeasible:
      return kExitInfeasible;
    default:
      return kExitIndeterminate;
  }
}

int run_oracle(const std::string& file) {
  const ConvexProgram program = load_problem_file(file);
  const harness::ReferenceResult r = harness::reference_solution(program);
  std::printf("status: %s\n", std::string(to_string(r.status)).c_str());
  if (r.status == harness::ReferenceStatus::Optimal) {
    std::printf("x*: %s\ny*: %s\nobjective: %.12g\n", vec(r.x).c_str(), vec(r.y).c_str(),
                r.objective);
  }
  if (!r.message.empty()) std::printf("note: %s\n", r.message.c_str());
  switch (r.status) {
    case harness::ReferenceStatus::Optimal:
      return kExitOptimal;
    case harness::ReferenceStatus::Infeasible:
      return kExitInfeasible;
    default:
      return kExitIndeterminate;
  }
}

int run_bench_infeasible(harness::ExperimentSpec spec, const std::string& out_path,
                         const std::string& traj) {
  spec.make_infeasible = true;
  spec.record_first_trajectory = !traj.empty();
  const auto summary = harness::run_infeasibility_experiment(spec);
  {
    auto out = open_out(out_path);
    harness::write_infeasibility_csv(out, summary);
  }
  if (summary.representative) {
    auto out = open_out(traj);
    harness::write_trajectory_csv(out, *summary.representative->trajectory, spec.n, spec.m + 1);
  }
  std::printf("%s: detected %d / %zu infeasible (rate %.2f)\n",
              std::string(to_string(spec.family)).c_str(), summary.detected,
              summary.rows.size(), summary.rate());
  return summary.detected == static_cast<int>(summary.rows.size()) ? 0 : kExitIndeterminate;
}

int run_bench_settling(harness::ExperimentSpec spec, const std::string& out_dir) {
  const auto curves = harness::run_settling_experiment(spec);
  const fs::path dir(out_dir);
  {
    auto out = open_out(dir / "settling_tp.csv");
    harness::write_settling_csv(out, curves.tp_runs);
  }
  {
    auto out = open_out(dir / "settling_init.csv");
    harness::write_settling_csv(out, curves.init_runs);
  }
  bool all = true;
  auto report = [&](const harness::SettlingRun& run) {
    const bool ok = run.report.z_norm <= 1e-8 && run.final_x_error <= 1e-4;
    all = all && ok;
    std::printf("T_p %-5g init %-4g  ||z(T_p)|| %.2e  ||x - x*|| %.2e  settle %s  %s\n", run.T_p,
                run.init_scale, run.report.z_norm, run.final_x_error,
                run.report.settle_time ? std::to_string(*run.report.settle_time).c_str() : "-",
                ok ? "ok" : "NOT SETTLED");
  };
  for (const auto& run : curves.tp_runs) report(run);
  for (const auto& run : curves.init_runs) report(run);
  return all ? 0 : kExitIndeterminate;
}

int run_generate(const std::string& family, int n, int m, std::uint64_t seed, bool infeasible,
                 const std::string& out_path) {
  ConvexProgram program = harness::generate_random(family_or_throw(family), n, m, seed);
  if (infeasible) program = augment_infeasible(program);
  const std::string text = serialize_program(program);
  if (out_path.empty()) {
    std::cout << text << '\n';
  } else {
    auto out = open_out(out_path);
    out << text << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-time dynamical-system solver for convex programs"};
  app.require_subcommand(1);

  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file");
  std::string problem_file, traj_file;
  double tp = 1.0, mu = 2.0, init_scale = 1.0;
  solve_cmd->add_option("problem-file", problem_file, "JSON problem file")->required();
  solve_cmd->add_option("--tp", tp, "Prescribed settling time")->capture_default_str();
  solve_cmd->add_option("--mu", mu, "Exponent mu > 1")->capture_default_str();
  solve_cmd->add_option("--init-scale", init_scale, "Initial state scale")->capture_default_str();
  solve_cmd->add_option("--traj", traj_file, "Write the sampled trajectory CSV");

  auto* oracle_cmd = app.add_subcommand("oracle", "Reference solution of a problem file");
  oracle_cmd->add_option("problem-file", problem_file, "JSON problem file")->required();

  auto* bench = app.add_subcommand("bench", "Experiment suites");
  bench->require_subcommand(1);
  harness::ExperimentSpec spec;
  std::string family = "lp", out_path, out_dir = ".";
  unsigned workers = 0;

  auto* infeasible = bench->add_subcommand("infeasible", "Infeasibility detection rates");
  double bench_tp = 1.0;
  infeasible->add_option("--family", family)->check(CLI::IsMember({"lp", "qp", "expsum"}));
  infeasible->add_option("--count", spec.count)->capture_default_str();
  infeasible->add_option("--n", spec.n)->capture_default_str();
  infeasible->add_option("--m", spec.m)->capture_default_str();
  infeasible->add_option("--tp", bench_tp)->capture_default_str();
  infeasible->add_option("--seed", spec.seed)->capture_default_str();
  infeasible->add_option("--out", out_path, "Per-instance CSV")->required();
  infeasible->add_option("--traj", traj_file, "Trajectory CSV of instance 0");
  infeasible->add_option("--workers", workers, "Worker threads (0: all cores)");

  auto* settling = bench->add_subcommand("settling", "Prescribed settling sweeps");
  std::vector<double> tp_list{1, 0.8, 0.6, 0.4, 0.2, 0.1};
  std::vector<double> init_list{2, 5, 10, 20, 40, 60, 80};
  std::string settling_family = "expsum";
  settling->add_option("--family", settling_family)->check(CLI::IsMember({"lp", "qp", "expsum"}));
  settling->add_option("--tp-list", tp_list)->delimiter(',')->capture_default_str();
  settling->add_option("--init-list", init_list)->delimiter(',')->capture_default_str();
  settling->add_option("--seed", spec.seed)->capture_default_str();
  settling->add_option("--n", spec.n)->capture_default_str();
  settling->add_option("--m", spec.m)->capture_default_str();
  settling->add_option("--out-dir", out_dir)->capture_default_str();
  settling->add_option("--workers", workers, "Worker threads (0: all cores)");

  auto* generate = app.add_subcommand("generate", "Write a random problem file");
  int gen_n = 5, gen_m = 2;
  std::uint64_t gen_seed = 0;
  bool gen_infeasible = false;
  std::string gen_family = "lp";
  generate->add_option("--family", gen_family)->check(CLI::IsMember({"lp", "qp", "expsum"}));
  generate->add_option("--n", gen_n)->capture_default_str();
  generate->add_option("--m", gen_m)->capture_default_str();
  generate->add_option("--seed", gen_seed)->capture_default_str();
  generate->add_flag("--infeasible", gen_infeasible, "Append the contradictory row");
  generate->add_option("--out", out_path, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return run_solve(problem_file, tp, mu, init_scale, traj_file);
    if (*oracle_cmd) return run_oracle(problem_file);
    if (*infeasible) {
      spec.family = family_or_throw(family);
      spec.tp_list = {bench_tp};
      spec.workers = workers;
      return run_bench_infeasible(spec, out_path, traj_file);
    }
    if (*settling) {
      spec.family = family_or_throw(settling_family);
      spec.count = 1;
      spec.tp_list = tp_list;
      spec.init_scales = init_list;
      spec.workers = workers;
      return run_bench_settling(spec, out_dir);
    }
    if (*generate) {
      return run_generate(gen_family, gen_n, gen_m, gen_seed, gen_infeasible, out_path);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
