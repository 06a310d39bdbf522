#include "ftopt/flows.hpp"

#include "ftopt/errors.hpp"

#include <cmath>
#include <numbers>

namespace ftopt {

namespace {

constexpr double kMinReciprocalCondition = 1e-14;

void check_gain(double k, double mu) {
  if (!(k > 0.0)) throw DomainError("gain k must be positive");
  if (!(mu > 1.0)) throw DomainError("exponent mu must exceed 1");
}

/// LU solve of A x = rhs after scaling rows, then columns, to unit
/// max-norm. Entries of diag(shat/xhat) span many orders of magnitude near
/// the solution, and the conditioning test should not count that scaling.
VectorXd equilibrated_solve(const MatrixXd& A, const VectorXd& rhs, const char* what) {
  VectorXd row_scale = A.cwiseAbs().rowwise().maxCoeff();
  for (Eigen::Index i = 0; i < row_scale.size(); ++i) {
    if (!(row_scale[i] > 0.0) || !std::isfinite(row_scale[i])) {
      throw DegenerateStateError(std::string(what) + ": zero or non-finite row " +
                                 std::to_string(i));
    }
    row_scale[i] = 1.0 / row_scale[i];
  }
  MatrixXd scaled = row_scale.asDiagonal() * A;
  VectorXd col_scale = scaled.cwiseAbs().colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < col_scale.size(); ++j) {
    if (!(col_scale[j] > 0.0)) {
      throw DegenerateStateError(std::string(what) + ": zero column " + std::to_string(j));
    }
    col_scale[j] = 1.0 / col_scale[j];
  }
  scaled = scaled * col_scale.asDiagonal();
  Eigen::PartialPivLU<MatrixXd> lu(scaled);
  const double rcond = lu.rcond();
  if (!(rcond >= kMinReciprocalCondition)) {
    throw DegenerateStateError(std::string(what) + ": matrix is singular to working precision "
                               "(rcond " + std::to_string(rcond) + ")");
  }
  return col_scale.cwiseProduct(lu.solve(row_scale.cwiseProduct(rhs)));
}

}  // namespace

double prescribe_gain(double T_p, double mu, FlowScheme scheme, std::optional<double> m_f) {
  if (!(T_p > 0.0)) throw DomainError("prescribed time T_p must be positive");
  if (!(mu > 1.0)) throw DomainError("exponent mu must exceed 1");
  const double base = mu * std::numbers::pi / (4.0 * T_p);
  if (scheme == FlowScheme::GradientFlow) {
    if (!m_f) throw DomainError("gradient flow gain needs the strong-convexity modulus m_f");
    if (!(*m_f > 0.0)) throw DomainError("m_f must be positive");
    return base / *m_f;
  }
  return base;
}

FlowConfig FlowConfig::from_settling_time(double T_p, double mu, FlowScheme scheme,
                                          std::optional<double> m_f) {
  FlowConfig cfg;
  cfg.mu = mu;
  cfg.T_p = T_p;
  cfg.scheme = scheme;
  cfg.m_f = m_f;
  cfg.k = prescribe_gain(T_p, mu, scheme, m_f);
  return cfg;
}

double contraction_rate(double norm, double k, double mu) {
  const double e = 2.0 / mu;
  return k * (std::pow(norm, -e) + std::pow(norm, e));
}

VectorXd reduced_rhs(const VectorXd& z, double k, double mu) {
  check_gain(k, mu);
  const double r = z.norm();
  if (r == 0.0) return VectorXd::Zero(z.size());
  return -contraction_rate(r, k, mu) * z;
}

double radial_norm_closed_form(double r0, double k, double t, double mu) {
  check_gain(k, mu);
  if (!(r0 > 0.0)) throw DomainError("initial norm r0 must be positive");
  if (t < 0.0) throw DomainError("time must be nonnegative");
  const double a = 2.0 / mu;
  const double phase = std::atan(std::pow(r0, a)) - a * k * t;
  if (phase <= 0.0) return 0.0;
  return std::pow(std::tan(phase), 1.0 / a);
}

double radial_settling_time(double r0, double k, double mu) {
  check_gain(k, mu);
  if (!(r0 >= 0.0)) throw DomainError("initial norm r0 must be nonnegative");
  const double a = 2.0 / mu;
  return std::atan(std::pow(r0, a)) / (a * k);
}

HmcpDerivative full_hmcp_rhs(const ConvexProgram& program, const HMCPState& state, double k,
                             double mu, double tau_min) {
  check_gain(k, mu);
  const Eigen::Index N = state.dimension();
  if (state.s_hat.size() != N || N != program.n() + program.m() + 1) {
    throw DimensionError("full_hmcp_rhs: state does not match the program");
  }
  if (!(state.x_hat.minCoeff() > 0.0)) {
    throw DomainError("full_hmcp_rhs: x_hat must be strictly positive");
  }
  if (!(state.s_hat.minCoeff() >= -1e-14)) {
    throw DomainError("full_hmcp_rhs: s_hat must be nonnegative");
  }

  const PsiEval ps = evaluate_psi(program, state.x_hat, true, tau_min);
  const VectorXd z1 = ps.value - state.s_hat;
  const VectorXd z2 = state.x_hat.cwiseProduct(state.s_hat);
  HmcpDerivative out;
  out.z_norm = std::sqrt(z1.squaredNorm() + z2.squaredNorm());
  if (out.z_norm == 0.0) {
    out.x_hat_dot = VectorXd::Zero(N);
    out.s_hat_dot = VectorXd::Zero(N);
    return out;
  }
  const double c = contraction_rate(out.z_norm, k, mu);

  const VectorXd ratio = state.s_hat.cwiseQuotient(state.x_hat);
  MatrixXd schur = ps.jacobian;
  schur.diagonal() += ratio;
  // diag(xhat)^{-1} * (-c xhat .* shat) = -c shat
  const VectorXd rhs = -c * (z1 + state.s_hat);
  out.x_hat_dot = equilibrated_solve(schur, rhs, "full_hmcp_rhs");
  out.s_hat_dot = -c * state.s_hat - ratio.cwiseProduct(out.x_hat_dot);
  return out;
}

VectorXd gradient_flow_rhs(const VectorXd& grad, double k, double mu) {
  return reduced_rhs(grad, k, mu);
}

VectorXd newton_flow_rhs(const VectorXd& grad, const MatrixXd& hess, double k, double mu) {
  check_gain(k, mu);
  if (hess.rows() != grad.size() || hess.cols() != grad.size()) {
    throw DimensionError("newton_flow_rhs: Hessian does not match the gradient");
  }
  const double r = grad.norm();
  if (r == 0.0) return VectorXd::Zero(grad.size());
  return equilibrated_solve(hess, -contraction_rate(r, k, mu) * grad, "newton_flow_rhs");
}

double settling_bound(const SettlingBoundParams& params) {
  struct Visitor {
    double operator()(const FiniteTimeBound& p) const {
      if (!(p.k > 0.0) || !(p.alpha > 0.0 && p.alpha < 1.0) || !(p.V0 >= 0.0)) {
        throw DomainError("finite-time bound needs k > 0, alpha in (0,1), V0 >= 0");
      }
      return std::pow(p.V0, 1.0 - p.alpha) / (p.k * (1.0 - p.alpha));
    }
    double operator()(const FixedTimeSumBound& p) const {
      if (!(p.k1 > 0.0) || !(p.k2 > 0.0) || !(p.alpha1 > 0.0 && p.alpha1 < 1.0) ||
          !(p.alpha2 > 1.0)) {
        throw DomainError("fixed-time bound needs k1, k2 > 0, alpha1 in (0,1), alpha2 > 1");
      }
      return 1.0 / (p.k1 * (1.0 - p.alpha1)) + 1.0 / (p.k2 * (p.alpha2 - 1.0));
    }
    double operator()(const FixedTimeTanBound& p) const {
      if (!(p.k1 > 0.0) || !(p.k2 > 0.0) || !(p.mu > 1.0)) {
        throw DomainError("fixed-time bound needs k1, k2 > 0 and mu > 1");
      }
      return p.mu * std::numbers::pi / std::sqrt(p.k1 * p.k2);
    }
    double operator()(const ResidualFlowBound& p) const {
      check_gain(p.k, p.mu);
      return p.mu * std::numbers::pi / (4.0 * p.k);
    }
  };
  return std::visit(Visitor{}, params);
}

}  // namespace ftopt
