#pragma once

// Fixed-time-stable vector fields. All of them drive a residual r (the
// gradient, or the HMCP residual z) along
//
//   r' = -k r / ||r||^(2/mu) - k r ||r||^(2/mu),
//
// which reaches r = 0 no later than mu*pi/(4k) from any starting point.

#include "ftopt/hmcp.hpp"

#include <optional>
#include <variant>

namespace ftopt {

enum class FlowScheme { ReducedZ, FullHMCP, GradientFlow, NewtonFlow };

/// Gain k that makes the scheme settle by T_p:
///   GradientFlow:                   mu*pi / (4 m_f T_p)
///   NewtonFlow, FullHMCP, ReducedZ: mu*pi / (4 T_p)    (= pi/(2 T_p) at mu = 2)
double prescribe_gain(double T_p, double mu, FlowScheme scheme,
                      std::optional<double> m_f = std::nullopt);

struct FlowConfig {
  double mu = 2.0;
  double k = 0.0;
  double T_p = 1.0;
  FlowScheme scheme = FlowScheme::FullHMCP;
  std::optional<double> m_f;

  static FlowConfig from_settling_time(double T_p, double mu, FlowScheme scheme,
                                       std::optional<double> m_f = std::nullopt);
};

/// k * (||r||^(-2/mu) + ||r||^(2/mu)), the common contraction rate.
double contraction_rate(double norm, double k, double mu);

/// r' for the residual dynamics above; returns 0 at r = 0.
VectorXd reduced_rhs(const VectorXd& z, double k, double mu);

/// Exact norm of the reduced dynamics started at norm r0 > 0:
///   ||z(t)|| = tan(atan(r0^(2/mu)) - (2k/mu) t)^(mu/2),  clamped to 0 after
/// settling. At mu = 2 this is tan(atan(r0) - k t).
double radial_norm_closed_form(double r0, double k, double t, double mu = 2.0);

/// Time at which radial_norm_closed_form reaches zero:
/// (mu / 2k) * atan(r0^(2/mu)).
double radial_settling_time(double r0, double k, double mu = 2.0);

struct HmcpDerivative {
  VectorXd x_hat_dot;
  VectorXd s_hat_dot;
  double z_norm = 0.0;
};

/// Solves the Newton-type system
///   grad psi(xhat) xhat' - shat'        = -c(||z||) (psi(xhat) - shat)
///   diag(shat) xhat' + diag(xhat) shat' = -c(||z||) (xhat .* shat)
/// with c = contraction_rate, through its Schur complement
///   (grad psi + diag(shat / xhat)) xhat' = -c ((psi - shat) + shat).
/// Requires xhat > 0 and shat >= -1e-14. Throws DegenerateStateError when the
/// (row-equilibrated) Schur matrix has reciprocal condition below 1e-14.
HmcpDerivative full_hmcp_rhs(const ConvexProgram& program, const HMCPState& state, double k,
                             double mu, double tau_min = kFlowTauMin);

/// x' = -k grad / ||grad||^(2/mu) - k grad ||grad||^(2/mu)
VectorXd gradient_flow_rhs(const VectorXd& grad, double k, double mu);

/// x' = -hess^{-1} (k grad / ||grad||^(2/mu) + k grad ||grad||^(2/mu)).
/// Throws DegenerateStateError for a (numerically) singular Hessian.
VectorXd newton_flow_rhs(const VectorXd& grad, const MatrixXd& hess, double k, double mu);

/// V' <= -k V^alpha, alpha in (0,1):  T <= V0^(1-alpha) / (k (1-alpha)).
struct FiniteTimeBound {
  double V0, k, alpha;
};
/// V' <= -k1 V^a1 - k2 V^a2:  T <= 1/(k1 (1-a1)) + 1/(k2 (a2-1)).
struct FixedTimeSumBound {
  double k1, k2, alpha1, alpha2;
};
/// Exponents 1 -/+ 1/(2 mu):  T <= mu*pi / sqrt(k1 k2).
struct FixedTimeTanBound {
  double k1, k2, mu;
};
/// The bound mu*pi/(4k) reached by the residual flows above with
/// V = ||r||^2 / 2; equals T_p under prescribe_gain.
struct ResidualFlowBound {
  double k, mu;
};

using SettlingBoundParams =
    std::variant<FiniteTimeBound, FixedTimeSumBound, FixedTimeTanBound, ResidualFlowBound>;

/// Throws DomainError when a parameter is outside the bound's range.
double settling_bound(const SettlingBoundParams& params);

}  // namespace ftopt
