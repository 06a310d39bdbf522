#pragma once

#include "ftopt/problem.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace ftopt::harness {

/// Random feasible program. Draw order from one SplitMix64Stream(seed):
///   A (m x n, row-major), x0 = |N| (n), eta = |N| (m), then
///   lp:     y0 = |N| (m), s0 = |N| (n), c = A^T y0 + s0
///   qp:     M (n x n, row-major), c (n);  Q = M^T M + 0.1 I
///   expsum: nothing further
/// and b = A x0 - eta, so x0 satisfies A x0 >= b strictly. The LP cost keeps
/// the dual feasible, so generated LPs are bounded.
ConvexProgram generate_random(Family family, int n, int m, std::uint64_t seed);

/// The point the generator built b around.
VectorXd construction_point(Family family, int n, int m, std::uint64_t seed);

std::optional<Family> parse_family(std::string_view name);

}  // namespace ftopt::harness
