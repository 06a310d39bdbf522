#pragma once

#include "ftopt/flows.hpp"
#include "ftopt/integrator.hpp"

#include <optional>
#include <string>

namespace ftopt {

struct SolverConfig {
  double T_p = 1.0;
  double mu = 2.0;
  double init_scale = 1.0;  // xhat(0) = shat(0) = init_scale * ones
  double tau_min = kFlowTauMin;  // psi clamp along the flow
  OutcomeThresholds thresholds;
  IntegratorConfig integrator;
  // A StepFailure whose last accepted ||z|| is within floor_slack *
  // stop_residual is classified as settled. The Schur system turns singular
  // along the solution ray, and the breakdown residual grows with the state
  // magnitude.
  double floor_slack = 10.0;
  bool record_trajectory = false;
};

struct SolveReport {
  Outcome outcome;
  std::optional<KktResidual> kkt;  // set for Optimal
  double tau = 0.0;
  double kappa = 0.0;
  double z_norm = 0.0;
  double gain = 0.0;
  std::optional<double> settle_time;
  StopEvent stop = StopEvent::ReachedEnd;
  std::string diagnostics;
  double wall_seconds = 0.0;
  double min_state_component = 0.0;
  HMCPState terminal;
  IntegratorStats stats;
  std::optional<Trajectory> trajectory;
};

/// Integrates the homogeneous fixed-time flow from init_scale * ones with
/// k = mu*pi/(4 T_p), stops at T_p or when ||z|| < stop_residual, then
/// classifies the terminal state. Integration failures yield Indeterminate
/// unless ||z|| already lies within floor_slack * stop_residual; only invalid
/// arguments throw.
SolveReport solve(const ConvexProgram& program, const SolverConfig& config = {});

struct UnconstrainedOracle {
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
  std::function<MatrixXd(const VectorXd&)> hessian;  // NewtonFlow only
};

struct UnconstrainedConfig {
  FlowScheme scheme = FlowScheme::NewtonFlow;  // or GradientFlow
  double T_p = 1.0;
  double mu = 2.0;
  std::optional<double> m_f;  // required by GradientFlow
  double gradient_tol = 1e-6;
  IntegratorConfig integrator;
  bool record_trajectory = false;
};

struct UnconstrainedReport {
  OutcomeKind outcome = OutcomeKind::Indeterminate;  // Optimal or Indeterminate
  VectorXd x;
  double gradient_norm = 0.0;
  double gain = 0.0;
  std::optional<double> settle_time;
  StopEvent stop = StopEvent::ReachedEnd;
  std::string diagnostics;
  double wall_seconds = 0.0;
  std::optional<Trajectory> trajectory;
};

/// Integrates the gradient- or Newton-type fixed-time flow from x0. The run
/// is Optimal when ||grad f|| <= gradient_tol at the end, including a
/// StepFailure whose last accepted state already meets gradient_tol.
UnconstrainedReport solve_unconstrained(const UnconstrainedOracle& oracle, const VectorXd& x0,
                                        const UnconstrainedConfig& config = {});

}  // namespace ftopt
