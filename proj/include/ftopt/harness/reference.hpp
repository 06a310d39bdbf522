#pragma once

// Ground-truth solutions that share no code with the flow pipeline beyond
// the problem data accessors.
//
//   lp:     vertex enumeration of the primal {x >= 0, A x >= b} and the dual
//           {y >= 0, A^T y <= c}
//   qp:     enumeration of complementarity patterns, each an equality
//           constrained linear system
//   expsum: primal-dual log-barrier path following with damped Newton steps

#include "ftopt/problem.hpp"

#include <string>
#include <string_view>

namespace ftopt::harness {

enum class ReferenceStatus { Optimal, Infeasible, Unbounded, Unavailable };

std::string_view to_string(ReferenceStatus status);

struct ReferenceResult {
  ReferenceStatus status = ReferenceStatus::Unavailable;
  VectorXd x;  // set for Optimal
  VectorXd y;  // multipliers of A x >= b
  double objective = 0.0;
  std::string message;
};

struct ReferenceOptions {
  long long max_enumeration = 2'000'000;  // subsets or patterns
  double feasibility_tol = 1e-9;
  double barrier_gap = 1e-10;
  int max_barrier_iterations = 500;
};

ReferenceResult reference_solution(const ConvexProgram& program,
                                   const ReferenceOptions& options = {});

/// True when some x >= 0 satisfies A x >= b (vertex enumeration). Throws
/// UnsupportedError past the enumeration budget.
bool affine_feasible(const MatrixXd& A, const VectorXd& b, const ReferenceOptions& options = {});

}  // namespace ftopt::harness
