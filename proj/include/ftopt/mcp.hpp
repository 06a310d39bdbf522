#pragma once

// KKT conditions of a ConvexProgram written as a monotone complementarity
// problem in xbar = (x, y) >= 0:
//
//   phi(x, y) = ( grad f(x) + sum_i y_i grad g_i(x),  -g(x) ).

#include "ftopt/problem.hpp"

namespace ftopt {

/// Stacked (x, y) and (s, v) of length n + m.
struct MCPPoint {
  VectorXd x_bar;
  VectorXd s_bar;
};

struct PhiEval {
  VectorXd value;     // n + m
  MatrixXd jacobian;  // (n+m) x (n+m); empty unless requested
  bool exp_capped = false;
};

/// Evaluates phi and, when `with_jacobian`, its Jacobian
///   [[ hess f + sum y_i hess g_i,  grad g^T ],
///    [ -grad g,                    0        ]].
PhiEval evaluate_phi(const ConvexProgram& program, const VectorXd& x_bar, bool with_jacobian);

VectorXd phi(const ConvexProgram& program, const VectorXd& x_bar);

MatrixXd phi_jacobian(const ConvexProgram& program, const VectorXd& x_bar);

/// (u - w)^T (phi(u) - phi(w)); nonnegative for convex programs.
double monotone_gap(const ConvexProgram& program, const VectorXd& u, const VectorXd& w);

struct KktResidual {
  double stationarity = 0.0;     // ||min(phi_1, 0)|| + ||min(x, 0)||
  double feasibility = 0.0;      // ||max(g(x), 0)||
  double complementarity = 0.0;  // |x^T phi_1| + |y^T g(x)|

  double max() const;
};

/// Diagnostic residual of a candidate primal-dual pair. x and y are clipped
/// at zero before the oracles are called; the negative parts still count in
/// the stationarity term.
KktResidual kkt_residual(const ConvexProgram& program, const VectorXd& x, const VectorXd& y);

}  // namespace ftopt
