#include "ftopt/harness/generate.hpp"

#include "ftopt/errors.hpp"
#include "ftopt/harness/random.hpp"

#include <cmath>

namespace ftopt::harness {

namespace {

struct Draws {
  MatrixXd A;
  VectorXd x0;
  VectorXd b;
  VectorXd c;
  MatrixXd Q;
};

MatrixXd normal_matrix(SplitMix64Stream& rng, int rows, int cols) {
  MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = rng.normal();
  return M;
}

VectorXd abs_normal_vector(SplitMix64Stream& rng, int size) {
  VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = std::abs(rng.normal());
  return v;
}

Draws draw(Family family, int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw DimensionError("generate_random needs n, m >= 1");
  if (family == Family::GenericOracle) throw UnsupportedError("cannot generate generic programs");
  SplitMix64Stream rng(seed);
  Draws d;
  d.A = normal_matrix(rng, m, n);
  d.x0 = abs_normal_vector(rng, n);
  const VectorXd eta = abs_normal_vector(rng, m);
  d.b = d.A * d.x0 - eta;
  if (family == Family::Lp) {
    const VectorXd y0 = abs_normal_vector(rng, m);
    const VectorXd s0 = abs_normal_vector(rng, n);
    d.c = d.A.transpose() * y0 + s0;
  } else if (family == Family::Qp) {
    const MatrixXd M = normal_matrix(rng, n, n);
    d.Q = M.transpose() * M + 0.1 * MatrixXd::Identity(n, n);
    d.c.resize(n);
    for (int i = 0; i < n; ++i) d.c[i] = rng.normal();
  }
  return d;
}

}  // namespace

ConvexProgram generate_random(Family family, int n, int m, std::uint64_t seed) {
  Draws d = draw(family, n, m, seed);
  switch (family) {
    case Family::Lp:
      return make_lp(std::move(d.c), std::move(d.A), std::move(d.b));
    case Family::Qp:
      return make_qp(std::move(d.Q), std::move(d.c), std::move(d.A), std::move(d.b));
    default:
      return make_expsum(std::move(d.A), std::move(d.b));
  }
}

VectorXd construction_point(Family family, int n, int m, std::uint64_t seed) {
  return draw(family, n, m, seed).x0;
}

std::optional<Family> parse_family(std::string_view name) {
  if (name == "lp") return Family::Lp;
  if (name == "qp") return Family::Qp;
  if (name == "expsum") return Family::ExpSum;
  return std::nullopt;
}

}  // namespace ftopt::harness
