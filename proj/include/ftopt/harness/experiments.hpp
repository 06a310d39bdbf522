#pragma once

#include "ftopt/harness/reference.hpp"
#include "ftopt/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ftopt::harness {

struct ExperimentSpec {
  Family family = Family::Lp;
  int count = 100;
  int n = 5;
  int m = 2;
  std::uint64_t seed = 0;  // instance i uses seed + i
  bool make_infeasible = false;
  std::vector<double> tp_list{1.0};
  std::vector<double> init_scales{1.0};
  double init_sweep_tp = 1.0;  // T_p of the initial-condition sweep
  double mu = 2.0;
  IntegratorConfig integrator;
  unsigned workers = 0;  // 0: hardware concurrency
  bool record_first_trajectory = false;
};

/// Throws DomainError on an unusable spec.
void validate(const ExperimentSpec& spec);

struct InstanceResult {
  int index = 0;
  std::uint64_t seed = 0;
  OutcomeKind outcome = OutcomeKind::Indeterminate;
  double tau = 0.0;
  double kappa = 0.0;
  double z_norm = 0.0;
  double min_component = 0.0;
  StopEvent stop = StopEvent::ReachedEnd;
  std::string diagnostics;
};

struct InfeasibilitySummary {
  std::vector<InstanceResult> rows;  // ordered by index
  int detected = 0;
  double rate() const;
  std::optional<SolveReport> representative;  // instance 0, with trajectory
};

InfeasibilitySummary run_infeasibility_experiment(const ExperimentSpec& spec);

struct SettlingRun {
  double T_p = 0.0;
  double init_scale = 0.0;
  SolveReport report;            // with trajectory
  std::vector<double> x_error;   // ||x(t)/tau(t) - x*|| per sample
  double final_x_error = 0.0;
};

struct SettlingCurves {
  VectorXd x_reference;
  std::vector<SettlingRun> tp_runs;    // init scale 1
  std::vector<SettlingRun> init_runs;  // T_p = init_sweep_tp
};

/// Uses the single feasible instance generated from spec.seed.
SettlingCurves run_settling_experiment(const ExperimentSpec& spec);

/// Header: t,x_1..x_n,y_1..y_m,tau,s_1..s_n,v_1..v_m,kappa,z_norm
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, int n, int m);
/// Header: index,seed,outcome,tau,kappa,z_norm,min_component,stop
void write_infeasibility_csv(std::ostream& out, const InfeasibilitySummary& summary);
/// Header: tp,init_scale,t,x_err,z_norm
void write_settling_csv(std::ostream& out, const std::vector<SettlingRun>& runs);

/// Runs job(i) for i in [0, count) on up to `workers` threads. Results are
/// written by index, so the output order does not depend on scheduling.
template <class Result, class Job>
std::vector<Result> parallel_map(int count, unsigned workers, Job job);

}  // namespace ftopt::harness

#include "ftopt/harness/parallel_map.inl"
