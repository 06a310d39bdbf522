#pragma once

// Homogeneous embedding of the KKT complementarity problem. With
// xhat = (xbar, tau) and shat = (sbar, kappa):
//
//   psi(xhat) = ( tau * phi(xbar / tau),  -xbar^T phi(xbar / tau) ),
//   z(xhat, shat) = ( psi(xhat) - shat,  xhat .* shat ).
//
// A complementary solution with tau > 0 recovers a KKT point; one with
// kappa > 0 certifies that no KKT point exists.

#include "ftopt/mcp.hpp"

#include <limits>
#include <optional>
#include <string_view>

namespace ftopt {

/// tau is clamped at this value before phi(xbar / tau) is evaluated.
inline constexpr double kTauMin = 1e-12;
/// Floor used along the flow. The 1e-12 clamp makes the vector field
/// non-smooth once an infeasible trajectory drives tau below it.
inline constexpr double kFlowTauMin = std::numeric_limits<double>::min();

struct HMCPState {
  VectorXd x_hat;  // (x, y, tau)
  VectorXd s_hat;  // (s, v, kappa)

  Eigen::Index dimension() const { return x_hat.size(); }
  double tau() const { return x_hat[x_hat.size() - 1]; }
  double kappa() const { return s_hat[s_hat.size() - 1]; }

  /// x_hat followed by s_hat.
  VectorXd packed() const;
  static HMCPState unpack(const VectorXd& packed);
  /// x_hat = s_hat = scale * ones(n + m + 1).
  static HMCPState uniform(int n, int m, double scale);
};

struct PsiEval {
  VectorXd value;
  MatrixXd jacobian;  // empty unless requested
  bool tau_clamped = false;
  bool exp_capped = false;
};

PsiEval evaluate_psi(const ConvexProgram& program, const VectorXd& x_hat, bool with_jacobian,
                     double tau_min = kTauMin);

VectorXd psi(const ConvexProgram& program, const VectorXd& x_hat, double tau_min = kTauMin);

/// Block form, with u = xbar / tau:
///   [[ J(u),                    phi(u) - J(u) u ],
///    [ -phi(u)^T - u^T J(u),    u^T J(u) u      ]]
MatrixXd psi_jacobian(const ConvexProgram& program, const VectorXd& x_hat,
                      double tau_min = kTauMin);

/// Stacked residual (psi(xhat) - shat, xhat .* shat), length 2(n+m+1).
VectorXd residual_z(const ConvexProgram& program, const HMCPState& state,
                    double tau_min = kTauMin);

struct OutcomeThresholds {
  double tau_floor = 1e-8;
  double ratio = 1.0;  // Optimal needs tau >= ratio * kappa
  double residual_tol = 1e-6;
};

enum class OutcomeKind { Optimal, Infeasible, Indeterminate };

std::string_view to_string(OutcomeKind kind);

struct OptimalPoint {
  VectorXd x, y, s, v;
};

struct InfeasibilityCertificate {
  VectorXd x_bar;  // xbar / kappa
  VectorXd s_bar;  // sbar / kappa
};

struct Outcome {
  OutcomeKind kind = OutcomeKind::Indeterminate;
  std::optional<OptimalPoint> solution;
  std::optional<InfeasibilityCertificate> certificate;
};

/// Reads the terminal state of the flow. n is the number of primal
/// variables (x_bar holds n primal then m dual entries). Ties tau == kappa
/// go to Optimal.
Outcome classify(const HMCPState& state, int n, double residual_norm,
                 const OutcomeThresholds& thresholds = {});

}  // namespace ftopt
