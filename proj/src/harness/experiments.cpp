#include "ftopt/harness/experiments.hpp"

#include "ftopt/errors.hpp"
#include "ftopt/harness/generate.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace ftopt::harness {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SolverConfig solver_config(const ExperimentSpec& spec, double T_p, double init_scale,
                           bool record) {
  SolverConfig cfg;
  cfg.T_p = T_p;
  cfg.mu = spec.mu;
  cfg.init_scale = init_scale;
  cfg.integrator = spec.integrator;
  cfg.record_trajectory = record;
  return cfg;
}

InstanceResult summarize(int index, std::uint64_t seed, const SolveReport& report) {
  InstanceResult row;
  row.index = index;
  row.seed = seed;
  row.outcome = report.outcome.kind;
  row.tau = report.tau;
  row.kappa = report.kappa;
  row.z_norm = report.z_norm;
  row.min_component = report.min_state_component;
  row.stop = report.stop;
  row.diagnostics = report.diagnostics;
  return row;
}

SettlingRun settling_run(const ConvexProgram& program, const VectorXd& x_ref,
                         const ExperimentSpec& spec, double T_p, double init_scale) {
  SettlingRun run;
  run.T_p = T_p;
  run.init_scale = init_scale;
  run.report = solve(program, solver_config(spec, T_p, init_scale, true));
  const Trajectory& tr = *run.report.trajectory;
  const int n = program.n();
  run.x_error.reserve(tr.states.size());
  for (const VectorXd& state : tr.states) {
    const double tau = std::max(state[n + program.m()], kTauMin);
    run.x_error.push_back((state.head(n) / tau - x_ref).norm());
  }
  const VectorXd& last = tr.final_state;
  run.final_x_error =
      (last.head(n) / std::max(last[n + program.m()], kTauMin) - x_ref).norm();
  return run;
}

}  // namespace

void validate(const ExperimentSpec& spec) {
  if (spec.count < 1) throw DomainError("experiment count must be at least 1");
  if (spec.n < 1 || spec.m < 1) throw DomainError("experiment needs n, m >= 1");
  if (spec.family == Family::GenericOracle) throw DomainError("experiments need a built-in family");
  for (double tp : spec.tp_list)
    if (!(tp > 0.0)) throw DomainError("T_p values must be positive");
  for (double s : spec.init_scales)
    if (!(s > 0.0)) throw DomainError("init scales must be positive");
  if (!(spec.init_sweep_tp > 0.0)) throw DomainError("init sweep T_p must be positive");
  validate(spec.integrator);
}

double InfeasibilitySummary::rate() const {
  return rows.empty() ? 0.0 : static_cast<double>(detected) / static_cast<double>(rows.size());
}

InfeasibilitySummary run_infeasibility_experiment(const ExperimentSpec& spec) {
  validate(spec);
  if (!spec.make_infeasible) throw DomainError("infeasibility experiment needs make_infeasible");
  if (spec.tp_list.size() != 1) throw DomainError("infeasibility experiment takes one T_p");
  const double T_p = spec.tp_list.front();

  InfeasibilitySummary summary;
  summary.rows = parallel_map<InstanceResult>(spec.count, spec.workers, [&](int i) {
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(i);
    const ConvexProgram program =
        augment_infeasible(generate_random(spec.family, spec.n, spec.m, seed));
    return summarize(i, seed, solve(program, solver_config(spec, T_p, 1.0, false)));
  });
  for (const auto& row : summary.rows)
    if (row.outcome == OutcomeKind::Infeasible) ++summary.detected;
  if (spec.record_first_trajectory) {
    const ConvexProgram program =
        augment_infeasible(generate_random(spec.family, spec.n, spec.m, spec.seed));
    summary.representative = solve(program, solver_config(spec, T_p, 1.0, true));
  }
  return summary;
}

SettlingCurves run_settling_experiment(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.make_infeasible) throw DomainError("settling experiment needs feasible problems");
  const ConvexProgram program = generate_random(spec.family, spec.n, spec.m, spec.seed);
  const ReferenceResult ref = reference_solution(program);
  if (ref.status != ReferenceStatus::Optimal) {
    throw Error("reference oracle returned " + std::string(to_string(ref.status)) +
                " for the settling instance");
  }
  SettlingCurves curves;
  curves.x_reference = ref.x;
  const int n_tp = static_cast<int>(spec.tp_list.size());
  const int n_init = static_cast<int>(spec.init_scales.size());
  auto runs = parallel_map<SettlingRun>(n_tp + n_init, spec.workers, [&](int i) {
    if (i < n_tp) return settling_run(program, ref.x, spec, spec.tp_list[i], 1.0);
    return settling_run(program, ref.x, spec, spec.init_sweep_tp, spec.init_scales[i - n_tp]);
  });
  curves.tp_runs.assign(std::make_move_iterator(runs.begin()),
                        std::make_move_iterator(runs.begin() + n_tp));
  curves.init_runs.assign(std::make_move_iterator(runs.begin() + n_tp),
                          std::make_move_iterator(runs.end()));
  return curves;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, int n, int m) {
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  for (int j = 1; j <= m; ++j) out << ",y_" << j;
  out << ",tau";
  for (int i = 1; i <= n; ++i) out << ",s_" << i;
  for (int j = 1; j <= m; ++j) out << ",v_" << j;
  out << ",kappa,z_norm\n";
  for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
    out << fmt(trajectory.times[k]);
    const VectorXd& y = trajectory.states[k];
    for (Eigen::Index i = 0; i < y.size(); ++i) out << ',' << fmt(y[i]);
    out << ',' << fmt(trajectory.residual_norms[k]) << '\n';
  }
}

void write_infeasibility_csv(std::ostream& out, const InfeasibilitySummary& summary) {
  out << "index,seed,outcome,tau,kappa,z_norm,min_component,stop\n";
  for (const auto& row : summary.rows) {
    out << row.index << ',' << row.seed << ',' << to_string(row.outcome) << ',' << fmt(row.tau)
        << ',' << fmt(row.kappa) << ',' << fmt(row.z_norm) << ',' << fmt(row.min_component)
        << ',' << to_string(row.stop) << '\n';
  }
}

void write_settling_csv(std::ostream& out, const std::vector<SettlingRun>& runs) {
  out << "tp,init_scale,t,x_err,z_norm\n";
  for (const auto& run : runs) {
    const Trajectory& tr = *run.report.trajectory;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      out << fmt(run.T_p) << ',' << fmt(run.init_scale) << ',' << fmt(tr.times[k]) << ','
          << fmt(run.x_error[k]) << ',' << fmt(tr.residual_norms[k]) << '\n';
    }
  }
}

}  // namespace ftopt::harness
