#include "ftopt/solver.hpp"

#include "ftopt/errors.hpp"

#include <chrono>

namespace ftopt {

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Freezes the last accepted state over the sample times not yet reached.
void hold_to_end(Trajectory& tr, double t_end, int sample_count) {
  const double last = tr.times.empty() ? -1.0 : tr.times.back();
  for (int i = 0; i < sample_count; ++i) {
    const double t = i == sample_count - 1 ? t_end : t_end * i / (sample_count - 1);
    if (t <= last) continue;
    tr.times.push_back(t);
    tr.states.push_back(tr.final_state);
    tr.residual_norms.push_back(tr.final_residual);
  }
}

}  // namespace

SolveReport solve(const ConvexProgram& program, const SolverConfig& config) {
  if (!(config.init_scale > 0.0)) throw DomainError("init_scale must be positive");
  if (!(config.floor_slack >= 1.0)) throw DomainError("floor_slack must be at least 1");
  validate(config.integrator);
  const auto start = std::chrono::steady_clock::now();

  SolveReport report;
  report.gain = prescribe_gain(config.T_p, config.mu, FlowScheme::FullHMCP);
  const double k = report.gain;
  const double mu = config.mu;
  const double tau_min = config.tau_min;

  OdeSystem system;
  system.rhs = [&program, k, mu, tau_min](const VectorXd& y) {
    const HmcpDerivative d = full_hmcp_rhs(program, HMCPState::unpack(y), k, mu, tau_min);
    VectorXd out(y.size());
    out << d.x_hat_dot, d.s_hat_dot;
    return out;
  };
  system.residual_norm = [&program, tau_min](const VectorXd& y) {
    return residual_z(program, HMCPState::unpack(y), tau_min).norm();
  };
  system.nonnegative = true;

  const HMCPState initial = HMCPState::uniform(program.n(), program.m(), config.init_scale);
  Trajectory tr = integrate(system, initial.packed(), config.T_p, config.integrator);

  report.stop = tr.stop;
  report.settle_time = tr.settle_time;
  report.stats = tr.stats;
  report.min_state_component = tr.min_component;
  report.terminal = HMCPState::unpack(tr.final_state);
  report.tau = report.terminal.tau();
  report.kappa = report.terminal.kappa();
  report.z_norm = tr.final_residual;

  const bool at_floor = tr.stop == StopEvent::StepFailure &&
                        tr.final_residual <= config.floor_slack * config.integrator.stop_residual;
  if (tr.stop == StopEvent::StepFailure && !at_floor) {
    report.diagnostics = "integration failed at t = " + std::to_string(tr.final_time) + ": " +
                         tr.failure;
  } else {
    if (at_floor) {
      hold_to_end(tr, config.T_p, config.integrator.sample_count);
      report.settle_time = tr.final_time;
      report.diagnostics = "integration stopped at the residual floor at t = " +
                           std::to_string(tr.final_time) + ": " + tr.failure;
    }
    report.outcome = classify(report.terminal, program.n(), report.z_norm, config.thresholds);
    if (report.outcome.kind == OutcomeKind::Optimal) {
      report.kkt = kkt_residual(program, report.outcome.solution->x, report.outcome.solution->y);
    } else if (report.outcome.kind == OutcomeKind::Indeterminate && !at_floor) {
      report.diagnostics = "terminal state does not separate tau and kappa";
    }
  }
  if (config.record_trajectory) report.trajectory = std::move(tr);
  report.wall_seconds = elapsed_seconds(start);
  return report;
}

UnconstrainedReport solve_unconstrained(const UnconstrainedOracle& oracle, const VectorXd& x0,
                                        const UnconstrainedConfig& config) {
  if (config.scheme != FlowScheme::GradientFlow && config.scheme != FlowScheme::NewtonFlow) {
    throw DomainError("solve_unconstrained supports GradientFlow and NewtonFlow only");
  }
  if (!oracle.gradient) throw DomainError("unconstrained oracle needs a gradient");
  if (config.scheme == FlowScheme::NewtonFlow && !oracle.hessian) {
    throw DomainError("Newton flow needs a Hessian");
  }
  validate(config.integrator);
  const auto start = std::chrono::steady_clock::now();

  UnconstrainedReport report;
  report.gain = prescribe_gain(config.T_p, config.mu, config.scheme, config.m_f);
  const double k = report.gain;
  const double mu = config.mu;

  OdeSystem system;
  if (config.scheme == FlowScheme::NewtonFlow) {
    system.rhs = [&oracle, k, mu](const VectorXd& x) {
      return newton_flow_rhs(oracle.gradient(x), oracle.hessian(x), k, mu);
    };
  } else {
    system.rhs = [&oracle, k, mu](const VectorXd& x) {
      return gradient_flow_rhs(oracle.gradient(x), k, mu);
    };
  }
  system.residual_norm = [&oracle](const VectorXd& x) { return oracle.gradient(x).norm(); };

  Trajectory tr = integrate(system, x0, config.T_p, config.integrator);
  report.stop = tr.stop;
  report.settle_time = tr.settle_time;
  report.x = tr.final_state;
  report.gradient_norm = tr.final_residual;
  if (tr.stop == StopEvent::StepFailure && report.gradient_norm > config.gradient_tol) {
    report.diagnostics = "integration failed at t = " + std::to_string(tr.final_time) + ": " +
                         tr.failure;
  } else if (report.gradient_norm <= config.gradient_tol) {
    report.outcome = OutcomeKind::Optimal;
    if (tr.stop == StopEvent::StepFailure) {
      hold_to_end(tr, config.T_p, config.integrator.sample_count);
      report.settle_time = tr.final_time;
      report.diagnostics = "integration stopped at the residual floor at t = " +
                           std::to_string(tr.final_time) + ": " + tr.failure;
    }
  } else {
    report.diagnostics = "gradient did not settle by T_p";
  }
  if (config.record_trajectory) report.trajectory = std::move(tr);
  report.wall_seconds = elapsed_seconds(start);
  return report;
}

}  // namespace ftopt
