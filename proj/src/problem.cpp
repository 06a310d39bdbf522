#include "ftopt/problem.hpp"

#include "ftopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace ftopt {

namespace {

constexpr double kDomainTolerance = 1e-12;

std::string dims(Eigen::Index rows, Eigen::Index cols) {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

void check_affine_dimensions(const VectorXd* c, const MatrixXd& A, const VectorXd& b) {
  if (A.rows() < 1 || A.cols() < 1) {
    throw DimensionError("constraint matrix A must be at least 1x1, got " +
                         dims(A.rows(), A.cols()));
  }
  if (b.size() != A.rows()) {
    throw DimensionError("b has length " + std::to_string(b.size()) + " but A is " +
                         dims(A.rows(), A.cols()));
  }
  if (c != nullptr && c->size() != A.cols()) {
    throw DimensionError("c has length " + std::to_string(c->size()) + " but A is " +
                         dims(A.rows(), A.cols()));
  }
}

bool all_finite(const MatrixXd& M) { return M.allFinite(); }

VectorXd capped_exp(const VectorXd& x, double cap, bool& capped) {
  VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double arg = x[i];
    if (arg > cap) {
      arg = cap;
      capped = true;
    }
    out[i] = std::exp(arg);
  }
  return out;
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Lp:
      return "lp";
    case Family::Qp:
      return "qp";
    case Family::ExpSum:
      return "expsum";
    case Family::GenericOracle:
      return "generic";
  }
  return "unknown";
}

ConvexProgram::ConvexProgram(Family family, AffineData data, double exp_cap)
    : family_(family), data_(std::move(data)), exp_cap_(exp_cap) {
  if (family == Family::GenericOracle) {
    throw UnsupportedError("generic programs must be built from a GenericOracle");
  }
  const bool uses_c = family != Family::ExpSum;
  check_affine_dimensions(uses_c ? &data_.c : nullptr, data_.A, data_.b);
  n_ = static_cast<int>(data_.A.cols());
  m_ = static_cast<int>(data_.A.rows());
  if (!uses_c) data_.c.resize(0);

  if (family == Family::Qp) {
    if (data_.Q.rows() != n_ || data_.Q.cols() != n_) {
      throw DimensionError("Q is " + dims(data_.Q.rows(), data_.Q.cols()) + " but n = " +
                           std::to_string(n_));
    }
    data_.Q = (0.5 * (data_.Q + data_.Q.transpose())).eval();
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<MatrixXd>(data_.Q, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
    if (min_eig < -kPsdTolerance) {
      std::ostringstream os;
      os << "Q is not positive semidefinite: min eigenvalue " << min_eig;
      throw NonconvexError(os.str());
    }
  } else {
    data_.Q.resize(0, 0);
  }

  if (!all_finite(data_.A) || !data_.b.allFinite() || !data_.c.allFinite() ||
      !all_finite(data_.Q)) {
    throw DomainError("problem data contains non-finite entries");
  }
  if (!(exp_cap_ > 0.0)) throw DomainError("exp cap must be positive");
}

ConvexProgram::ConvexProgram(int n, int m, GenericOracle oracle)
    : family_(Family::GenericOracle), n_(n), m_(m), oracle_(std::move(oracle)) {
  if (n < 1 || m < 0) throw DimensionError("generic program needs n >= 1 and m >= 0");
  if (!oracle_.objective || !oracle_.gradient || !oracle_.hessian) {
    throw DomainError("generic oracle must provide objective, gradient and hessian");
  }
  if (m > 0 && (!oracle_.constraints || !oracle_.jacobian)) {
    throw DomainError("generic oracle with constraints must provide g and its jacobian");
  }
}

const GenericOracle& ConvexProgram::oracle() const {
  if (family_ != Family::GenericOracle) {
    throw UnsupportedError("program of family '" + std::string(to_string(family_)) +
                           "' has no generic oracle");
  }
  return oracle_;
}

ConvexProgram make_lp(VectorXd c, MatrixXd A, VectorXd b) {
  return ConvexProgram(Family::Lp, {std::move(c), MatrixXd(), std::move(A), std::move(b)});
}

ConvexProgram make_qp(MatrixXd Q, VectorXd c, MatrixXd A, VectorXd b) {
  return ConvexProgram(Family::Qp, {std::move(c), std::move(Q), std::move(A), std::move(b)});
}

ConvexProgram make_expsum(MatrixXd A, VectorXd b, double exp_cap) {
  return ConvexProgram(Family::ExpSum, {VectorXd(), MatrixXd(), std::move(A), std::move(b)},
                       exp_cap);
}

ConvexProgram make_generic(int n, int m, GenericOracle oracle) {
  return ConvexProgram(n, m, std::move(oracle));
}

OracleEval evaluate(const ConvexProgram& program, const VectorXd& x, const VectorXd& y) {
  const int n = program.n();
  const int m = program.m();
  if (x.size() != n || y.size() != m) {
    throw DimensionError("evaluate: expected x of length " + std::to_string(n) +
                         " and y of length " + std::to_string(m));
  }
  if (x.size() > 0 && x.minCoeff() < -kDomainTolerance) {
    throw DomainError("evaluate: x must be nonnegative");
  }
  if (y.size() > 0 && y.minCoeff() < -kDomainTolerance) {
    throw DomainError("evaluate: y must be nonnegative");
  }

  OracleEval eval;
  switch (program.family()) {
    case Family::Lp:
      eval.objective = program.c().dot(x);
      eval.grad_f = program.c();
      eval.weighted_hessian = MatrixXd::Zero(n, n);
      break;
    case Family::Qp:
      eval.grad_f = program.Q() * x + program.c();
      eval.objective = 0.5 * x.dot(program.Q() * x) + program.c().dot(x);
      eval.weighted_hessian = program.Q();
      break;
    case Family::ExpSum: {
      VectorXd e = capped_exp(x, program.exp_cap(), eval.exp_capped);
      eval.objective = e.sum();
      eval.weighted_hessian = e.asDiagonal();
      eval.grad_f = std::move(e);
      break;
    }
    case Family::GenericOracle: {
      const GenericOracle& o = program.oracle();
      eval.objective = o.objective(x);
      eval.grad_f = o.gradient(x);
      eval.weighted_hessian = o.hessian(x);
      if (m > 0) {
        eval.g = o.constraints(x);
        eval.g_jacobian = o.jacobian(x);
        if (o.constraint_hessian) eval.weighted_hessian += o.constraint_hessian(x, y);
      } else {
        eval.g.resize(0);
        eval.g_jacobian.resize(0, n);
      }
      if (eval.grad_f.size() != n || eval.weighted_hessian.rows() != n ||
          eval.weighted_hessian.cols() != n || eval.g.size() != m ||
          eval.g_jacobian.rows() != m || eval.g_jacobian.cols() != n) {
        throw DimensionError("generic oracle returned inconsistent dimensions");
      }
      return eval;
    }
  }

  eval.g = program.b() - program.A() * x;
  eval.g_jacobian = -program.A();
  return eval;
}

ConvexProgram augment_infeasible(const ConvexProgram& program) {
  if (!program.has_affine_constraints()) {
    throw UnsupportedError("augment_infeasible needs affine constraints");
  }
  const int n = program.n();
  const int m = program.m();
  MatrixXd A(m + 1, n);
  A.topRows(m) = program.A();
  A.row(m).setConstant(-1.0);
  VectorXd b(m + 1);
  b.head(m) = program.b();
  b[m] = 1.0;
  return ConvexProgram(program.family(), {program.c(), program.Q(), std::move(A), std::move(b)},
                       program.exp_cap());
}

double data_scale(const ConvexProgram& program) {
  if (!program.has_affine_constraints()) return 0.0;
  double scale = program.A().cwiseAbs().maxCoeff();
  scale = std::max(scale, program.b().cwiseAbs().maxCoeff());
  if (program.c().size() > 0) scale = std::max(scale, program.c().cwiseAbs().maxCoeff());
  if (program.Q().size() > 0) scale = std::max(scale, program.Q().cwiseAbs().maxCoeff());
  return scale;
}

VectorXd SplitProgram::recover(const VectorXd& split_x) const {
  if (split_x.size() != 2 * free_dimension) {
    throw DimensionError("recover: expected a vector of length " +
                         std::to_string(2 * free_dimension));
  }
  return split_x.head(free_dimension) - split_x.tail(free_dimension);
}

SplitProgram split_free_variables(const ConvexProgram& free_program) {
  const int n = free_program.n();
  const int m = free_program.m();
  // Maps split variables back to the free ones: x = P * (x_plus, x_minus).
  MatrixXd P(n, 2 * n);
  P << MatrixXd::Identity(n, n), -MatrixXd::Identity(n, n);

  if (free_program.family() == Family::Lp || free_program.family() == Family::Qp) {
    VectorXd c(2 * n);
    c << free_program.c(), -free_program.c();
    MatrixXd A = free_program.A() * P;
    if (free_program.family() == Family::Lp) {
      return {make_lp(std::move(c), std::move(A), free_program.b()), n};
    }
    MatrixXd Q = P.transpose() * free_program.Q() * P;
    return {make_qp(std::move(Q), std::move(c), std::move(A), free_program.b()), n};
  }

  // Free-variable oracles for the remaining families, composed with P.
  GenericOracle base;
  if (free_program.family() == Family::ExpSum) {
    const MatrixXd A = free_program.A();
    const VectorXd b = free_program.b();
    const double cap = free_program.exp_cap();
    auto ex = [cap](const VectorXd& x) {
      return x.unaryExpr([cap](double v) { return std::exp(std::min(v, cap)); }).eval();
    };
    base.objective = [ex](const VectorXd& x) { return ex(x).sum(); };
    base.gradient = ex;
    base.hessian = [ex](const VectorXd& x) { return MatrixXd(ex(x).asDiagonal()); };
    base.constraints = [A, b](const VectorXd& x) { return VectorXd(b - A * x); };
    base.jacobian = [A](const VectorXd&) { return MatrixXd(-A); };
  } else {
    base = free_program.oracle();
  }

  GenericOracle split;
  split.objective = [base, P](const VectorXd& xs) { return base.objective(P * xs); };
  split.gradient = [base, P](const VectorXd& xs) {
    return VectorXd(P.transpose() * base.gradient(P * xs));
  };
  split.hessian = [base, P](const VectorXd& xs) {
    return MatrixXd(P.transpose() * base.hessian(P * xs) * P);
  };
  if (m > 0) {
    split.constraints = [base, P](const VectorXd& xs) { return base.constraints(P * xs); };
    split.jacobian = [base, P](const VectorXd& xs) {
      return MatrixXd(base.jacobian(P * xs) * P);
    };
    if (base.constraint_hessian) {
      split.constraint_hessian = [base, P](const VectorXd& xs, const VectorXd& y) {
        return MatrixXd(P.transpose() * base.constraint_hessian(P * xs, y) * P);
      };
    }
  }
  return {make_generic(2 * n, m, std::move(split)), n};
}

}  // namespace ftopt
