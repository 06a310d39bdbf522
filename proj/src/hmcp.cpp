#include "ftopt/hmcp.hpp"

#include "ftopt/errors.hpp"

#include <cmath>

namespace ftopt {

VectorXd HMCPState::packed() const {
  VectorXd out(x_hat.size() + s_hat.size());
  out << x_hat, s_hat;
  return out;
}

HMCPState HMCPState::unpack(const VectorXd& packed) {
  if (packed.size() % 2 != 0 || packed.size() < 4) {
    throw DimensionError("HMCP state vector must have even length >= 4");
  }
  const Eigen::Index half = packed.size() / 2;
  return {packed.head(half), packed.tail(half)};
}

HMCPState HMCPState::uniform(int n, int m, double scale) {
  if (!(scale > 0.0)) throw DomainError("initial scale must be positive");
  const VectorXd v = VectorXd::Constant(n + m + 1, scale);
  return {v, v};
}

PsiEval evaluate_psi(const ConvexProgram& program, const VectorXd& x_hat, bool with_jacobian,
                     double tau_min) {
  if (!(tau_min > 0.0)) throw DomainError("psi: tau_min must be positive");
  const Eigen::Index nbar = program.n() + program.m();
  if (x_hat.size() != nbar + 1) {
    throw DimensionError("psi: expected x_hat of length " + std::to_string(nbar + 1));
  }
  PsiEval out;
  double tau = x_hat[nbar];
  if (!(tau >= tau_min)) {
    tau = tau_min;
    out.tau_clamped = true;
  }
  const auto x_bar = x_hat.head(nbar);
  const VectorXd u = x_bar / tau;
  PhiEval ph = evaluate_phi(program, u, with_jacobian);
  out.exp_capped = ph.exp_capped;

  out.value.resize(nbar + 1);
  out.value.head(nbar) = tau * ph.value;
  out.value[nbar] = -x_bar.dot(ph.value);

  if (with_jacobian) {
    const MatrixXd& J = ph.jacobian;
    const VectorXd Ju = J * u;
    const Eigen::RowVectorXd uJ = u.transpose() * J;
    out.jacobian.resize(nbar + 1, nbar + 1);
    out.jacobian.topLeftCorner(nbar, nbar) = J;
    out.jacobian.topRightCorner(nbar, 1) = ph.value - Ju;
    out.jacobian.bottomLeftCorner(1, nbar) = -ph.value.transpose() - uJ;
    out.jacobian(nbar, nbar) = u.dot(Ju);
  }
  return out;
}

VectorXd psi(const ConvexProgram& program, const VectorXd& x_hat, double tau_min) {
  return evaluate_psi(program, x_hat, false, tau_min).value;
}

MatrixXd psi_jacobian(const ConvexProgram& program, const VectorXd& x_hat, double tau_min) {
  return evaluate_psi(program, x_hat, true, tau_min).jacobian;
}

VectorXd residual_z(const ConvexProgram& program, const HMCPState& state, double tau_min) {
  const Eigen::Index N = state.dimension();
  if (state.s_hat.size() != N) throw DimensionError("x_hat and s_hat lengths differ");
  VectorXd z(2 * N);
  z.head(N) = psi(program, state.x_hat, tau_min) - state.s_hat;
  z.tail(N) = state.x_hat.cwiseProduct(state.s_hat);
  return z;
}

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Optimal:
      return "optimal";
    case OutcomeKind::Infeasible:
      return "infeasible";
    case OutcomeKind::Indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

Outcome classify(const HMCPState& state, int n, double residual_norm,
                 const OutcomeThresholds& thresholds) {
  const Eigen::Index N = state.dimension();
  const Eigen::Index nbar = N - 1;
  if (n < 0 || n > nbar) throw DimensionError("classify: n out of range");
  const Eigen::Index m = nbar - n;

  Outcome out;
  const double tau = state.tau();
  const double kappa = state.kappa();
  if (!std::isfinite(tau) || !std::isfinite(kappa) || !std::isfinite(residual_norm) ||
      residual_norm > thresholds.residual_tol) {
    return out;
  }

  if (tau >= thresholds.ratio * kappa) {
    if (tau <= thresholds.tau_floor) return out;
    out.kind = OutcomeKind::Optimal;
    OptimalPoint p;
    p.x = state.x_hat.head(n) / tau;
    p.y = state.x_hat.segment(n, m) / tau;
    p.s = state.s_hat.head(n) / tau;
    p.v = state.s_hat.segment(n, m) / tau;
    out.solution = std::move(p);
    return out;
  }

  if (kappa <= thresholds.tau_floor) return out;
  out.kind = OutcomeKind::Infeasible;
  out.certificate = InfeasibilityCertificate{state.x_hat.head(nbar) / kappa,
                                             state.s_hat.head(nbar) / kappa};
  return out;
}

}  // namespace ftopt
