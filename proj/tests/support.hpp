#pragma once

#include "ftopt/harness/generate.hpp"
#include "ftopt/hmcp.hpp"

#include <functional>
#include <random>

namespace ftopt::test {

inline VectorXd random_positive(std::mt19937_64& rng, Eigen::Index size, double lo = 0.1,
                                double hi = 2.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = d(rng);
  return v;
}

inline VectorXd random_normal(std::mt19937_64& rng, Eigen::Index size) {
  std::normal_distribution<double> d;
  VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = d(rng);
  return v;
}

inline double rel_err(const MatrixXd& a, const MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

/// Central-difference Jacobian of F at x.
inline MatrixXd central_jacobian(const std::function<VectorXd(const VectorXd&)>& F,
                                 const VectorXd& x, double h = 1e-6) {
  const VectorXd f0 = F(x);
  MatrixXd J(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    VectorXd xp = x, xm = x;
    const double step = h * std::max(1.0, std::abs(x[j]));
    xp[j] += step;
    xm[j] -= step;
    J.col(j) = (F(xp) - F(xm)) / (2.0 * step);
  }
  return J;
}

inline ConvexProgram random_program(Family family, std::uint64_t seed, int n = 5, int m = 2) {
  return harness::generate_random(family, n, m, seed);
}

inline constexpr Family kFamilies[] = {Family::Lp, Family::Qp, Family::ExpSum};

}  // namespace ftopt::test
