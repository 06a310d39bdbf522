#pragma once

// Convex programs of the form
//
//   minimize    f(x)
//   subject to  g_i(x) <= 0,  i = 1..m
//               x >= 0
//
// Built-in families use affine constraints written as A x >= b, stored in
// the canonical sign g(x) = b - A x <= 0.

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <string_view>

namespace ftopt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Family { Lp, Qp, ExpSum, GenericOracle };

std::string_view to_string(Family family);

/// Exponent arguments above this value are clamped before exp() in the
/// ExpSum family.
inline constexpr double kDefaultExpCap = 700.0;

/// Tolerance on the smallest eigenvalue of the symmetrized Q.
inline constexpr double kPsdTolerance = 1e-10;

/// User supplied evaluation handles. f and every g_i must be C^2 and convex on
/// the nonnegative orthant; Hessians are required (no finite-difference
/// fallback).
struct GenericOracle {
  std::function<double(const VectorXd&)> objective;
  std::function<VectorXd(const VectorXd&)> gradient;
  std::function<MatrixXd(const VectorXd&)> hessian;
  std::function<VectorXd(const VectorXd&)> constraints;  // g(x), length m
  std::function<MatrixXd(const VectorXd&)> jacobian;     // m x n
  // sum_i y_i * hess g_i(x). Leave empty when every g_i is affine.
  std::function<MatrixXd(const VectorXd&, const VectorXd&)> constraint_hessian;
};

/// Everything the KKT map needs at one (x, y).
struct OracleEval {
  double objective = 0.0;
  VectorXd grad_f;
  VectorXd g;
  MatrixXd g_jacobian;        // m x n
  MatrixXd weighted_hessian;  // hess f + sum_i y_i hess g_i
  bool exp_capped = false;    // an ExpSum argument hit the cap
};

/// Immutable convex program. Construct through make_lp / make_qp /
/// make_expsum / make_generic, which validate the data.
class ConvexProgram {
 public:
  struct AffineData {
    VectorXd c;  // LP, QP
    MatrixXd Q;  // QP
    MatrixXd A;
    VectorXd b;
  };

  ConvexProgram(Family family, AffineData data, double exp_cap = kDefaultExpCap);
  ConvexProgram(int n, int m, GenericOracle oracle);

  Family family() const { return family_; }
  int n() const { return n_; }
  int m() const { return m_; }

  bool has_affine_constraints() const { return family_ != Family::GenericOracle; }

  const VectorXd& c() const { return data_.c; }
  const MatrixXd& Q() const { return data_.Q; }
  const MatrixXd& A() const { return data_.A; }
  const VectorXd& b() const { return data_.b; }
  double exp_cap() const { return exp_cap_; }

  /// Throws UnsupportedError unless family() == GenericOracle.
  const GenericOracle& oracle() const;

 private:
  Family family_;
  int n_ = 0;
  int m_ = 0;
  AffineData data_;
  GenericOracle oracle_;
  double exp_cap_ = kDefaultExpCap;
};

ConvexProgram make_lp(VectorXd c, MatrixXd A, VectorXd b);

/// Q is replaced by (Q + Q^T)/2 and must be PSD to within kPsdTolerance.
ConvexProgram make_qp(MatrixXd Q, VectorXd c, MatrixXd A, VectorXd b);

ConvexProgram make_expsum(MatrixXd A, VectorXd b, double exp_cap = kDefaultExpCap);

ConvexProgram make_generic(int n, int m, GenericOracle oracle);

/// Evaluates gradients, constraints and the y-weighted Hessian at (x, y).
/// Requires x >= -1e-12 and y >= -1e-12 componentwise.
OracleEval evaluate(const ConvexProgram& program, const VectorXd& x, const VectorXd& y);

/// Appends the row sum(x) <= -1, i.e. A <- [A; -1^T], b <- [b; 1]. No
/// nonnegative x satisfies it.
ConvexProgram augment_infeasible(const ConvexProgram& program);

/// Largest absolute entry of the problem data (c, Q, A, b); used to scale
/// KKT tolerances. Zero for GenericOracle programs.
double data_scale(const ConvexProgram& program);

/// A program over free variables rewritten in nonnegative variables through
/// x = x_plus - x_minus.
struct SplitProgram {
  ConvexProgram program;  // 2n variables, ordered (x_plus, x_minus)
  int free_dimension = 0;

  VectorXd recover(const VectorXd& split_x) const;
};

/// Interprets `free_program` as having unrestricted x (its own x >= 0 is
/// ignored) and returns the equivalent program in (x_plus, x_minus) >= 0.
/// LP and QP stay in their family; ExpSum and GenericOracle become
/// GenericOracle.
SplitProgram split_free_variables(const ConvexProgram& free_program);

}  // namespace ftopt
