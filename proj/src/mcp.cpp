#include "ftopt/mcp.hpp"

#include "ftopt/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ftopt {

PhiEval evaluate_phi(const ConvexProgram& program, const VectorXd& x_bar, bool with_jacobian) {
  const int n = program.n();
  const int m = program.m();
  if (x_bar.size() != n + m) {
    throw DimensionError("phi: expected x_bar of length " + std::to_string(n + m));
  }
  const OracleEval eval = evaluate(program, x_bar.head(n), x_bar.tail(m));

  PhiEval out;
  out.exp_capped = eval.exp_capped;
  out.value.resize(n + m);
  out.value.head(n) = eval.grad_f + eval.g_jacobian.transpose() * x_bar.tail(m);
  out.value.tail(m) = -eval.g;

  if (with_jacobian) {
    out.jacobian.setZero(n + m, n + m);
    out.jacobian.topLeftCorner(n, n) = eval.weighted_hessian;
    out.jacobian.topRightCorner(n, m) = eval.g_jacobian.transpose();
    out.jacobian.bottomLeftCorner(m, n) = -eval.g_jacobian;
  }
  return out;
}

VectorXd phi(const ConvexProgram& program, const VectorXd& x_bar) {
  return evaluate_phi(program, x_bar, false).value;
}

MatrixXd phi_jacobian(const ConvexProgram& program, const VectorXd& x_bar) {
  return evaluate_phi(program, x_bar, true).jacobian;
}

double monotone_gap(const ConvexProgram& program, const VectorXd& u, const VectorXd& w) {
  return (u - w).dot(phi(program, u) - phi(program, w));
}

double KktResidual::max() const { return std::max({stationarity, feasibility, complementarity}); }

KktResidual kkt_residual(const ConvexProgram& program, const VectorXd& x, const VectorXd& y) {
  const int n = program.n();
  const int m = program.m();
  if (x.size() != n || y.size() != m) {
    throw DimensionError("kkt_residual: expected x of length " + std::to_string(n) +
                         " and y of length " + std::to_string(m));
  }
  const VectorXd xp = x.cwiseMax(0.0);
  const VectorXd yp = y.cwiseMax(0.0);
  const OracleEval eval = evaluate(program, xp, yp);
  const VectorXd phi1 = eval.grad_f + eval.g_jacobian.transpose() * yp;

  KktResidual r;
  r.stationarity = phi1.cwiseMin(0.0).norm() + x.cwiseMin(0.0).norm();
  r.feasibility = eval.g.cwiseMax(0.0).norm();
  r.complementarity = std::abs(xp.dot(phi1)) + std::abs(yp.dot(eval.g));
  return r;
}

}  // namespace ftopt
