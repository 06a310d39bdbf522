#include "ftopt/harness/reference.hpp"

#include "ftopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace ftopt::harness {

namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<long long>(std::llround(std::min<long double>(r, 1e18L)));
}

/// Calls visit(rows) for every k-subset of {0..n-1} in lexicographic order
/// until visit returns false.
template <class Visit>
void for_each_subset(int n, int k, Visit&& visit) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!visit(idx)) return;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Solves the square system, or nullopt when it is numerically singular.
std::optional<VectorXd> solve_square(const MatrixXd& M, const VectorXd& rhs) {
  Eigen::FullPivLU<MatrixXd> lu(M);
  lu.setThreshold(1e-11);
  if (!lu.isInvertible()) return std::nullopt;
  VectorXd x = lu.solve(rhs);
  if (!x.allFinite()) return std::nullopt;
  return x;
}

struct Vertex {
  VectorXd point;
  double value;
};

/// Vertices of {x : G x >= h} (G is rows x dim, pointed). Keeps the one
/// minimizing cost^T x; reports whether any vertex exists.
std::optional<Vertex> best_vertex(const MatrixXd& G, const VectorXd& h, const VectorXd& cost,
                                  const ReferenceOptions& options) {
  const int rows = static_cast<int>(G.rows());
  const int dim = static_cast<int>(G.cols());
  if (binomial(rows, dim) > options.max_enumeration) {
    throw UnsupportedError("vertex enumeration budget exceeded");
  }
  std::optional<Vertex> best;
  MatrixXd M(dim, dim);
  VectorXd rhs(dim);
  for_each_subset(rows, dim, [&](const std::vector<int>& active) {
    for (int i = 0; i < dim; ++i) {
      M.row(i) = G.row(active[i]);
      rhs[i] = h[active[i]];
    }
    const auto x = solve_square(M, rhs);
    if (!x) return true;
    const VectorXd slack = G * *x - h;
    const double scale = 1.0 + h.cwiseAbs().maxCoeff() + x->cwiseAbs().maxCoeff();
    if (slack.minCoeff() < -options.feasibility_tol * scale) return true;
    const double value = cost.dot(*x);
    if (!best || value < best->value) best = Vertex{*x, value};
    return true;
  });
  return best;
}

/// Stacks x >= 0 on top of A x >= b.
void primal_system(const MatrixXd& A, const VectorXd& b, MatrixXd& G, VectorXd& h) {
  const Eigen::Index n = A.cols(), m = A.rows();
  G.resize(n + m, n);
  G << MatrixXd::Identity(n, n), A;
  h.resize(n + m);
  h << VectorXd::Zero(n), b;
}

ReferenceResult infeasible_result() {
  ReferenceResult r;
  r.status = ReferenceStatus::Infeasible;
  r.message = "no x >= 0 satisfies A x >= b";
  return r;
}

ReferenceResult solve_lp(const ConvexProgram& p, const ReferenceOptions& options) {
  const int n = p.n(), m = p.m();
  MatrixXd G;
  VectorXd h;
  primal_system(p.A(), p.b(), G, h);
  const auto primal = best_vertex(G, h, p.c(), options);
  if (!primal) return infeasible_result();

  // Dual: maximize b^T y over y >= 0, c - A^T y >= 0.
  MatrixXd D(m + n, m);
  D << MatrixXd::Identity(m, m), -p.A().transpose();
  VectorXd d(m + n);
  d << VectorXd::Zero(m), -p.c();
  const auto dual = best_vertex(D, d, -p.b(), options);
  ReferenceResult r;
  if (!dual) {
    r.status = ReferenceStatus::Unbounded;
    r.message = "dual infeasible";
    return r;
  }
  r.status = ReferenceStatus::Optimal;
  r.x = primal->point;
  r.y = dual->point;
  r.objective = primal->value;
  return r;
}

ReferenceResult solve_qp(const ConvexProgram& p, const ReferenceOptions& options) {
  const int n = p.n(), m = p.m();
  if (n + m >= 62 || (1LL << (n + m)) > options.max_enumeration) {
    throw UnsupportedError("complementarity pattern budget exceeded");
  }
  if (!affine_feasible(p.A(), p.b(), options)) return infeasible_result();

  const MatrixXd& Q = p.Q();
  const MatrixXd& A = p.A();
  const double tol = options.feasibility_tol;
  std::optional<ReferenceResult> best;
  // Bit i < n set: x_i = 0 (s_i free). Bit n + j set: row j active (y_j free).
  for (long long pattern = 0; pattern < (1LL << (n + m)); ++pattern) {
    std::vector<int> zero_x, active;
    for (int i = 0; i < n; ++i)
      if (pattern >> i & 1) zero_x.push_back(i);
    for (int j = 0; j < m; ++j)
      if (pattern >> (n + j) & 1) active.push_back(j);
    const int nz = static_cast<int>(zero_x.size());
    const int na = static_cast<int>(active.size());
    const int size = n + na + nz;
    // Unknowns (x, y_active, s_zero):
    //   Q x + c - A_a^T y_a - E s = 0,  x_i = 0 (i in zero_x),  A_a x = b_a.
    MatrixXd M = MatrixXd::Zero(size, size);
    VectorXd rhs = VectorXd::Zero(size);
    M.topLeftCorner(n, n) = Q;
    rhs.head(n) = -p.c();
    for (int k = 0; k < na; ++k) M.block(0, n + k, n, 1) = -A.row(active[k]).transpose();
    for (int k = 0; k < nz; ++k) M(zero_x[k], n + na + k) = -1.0;
    for (int k = 0; k < nz; ++k) M(n + k, zero_x[k]) = 1.0;
    for (int k = 0; k < na; ++k) {
      M.row(n + nz + k).head(n) = A.row(active[k]);
      rhs[n + nz + k] = p.b()[active[k]];
    }
    const auto sol = solve_square(M, rhs);
    if (!sol) continue;
    const VectorXd x = sol->head(n);
    const VectorXd ya = sol->segment(n, na);
    const VectorXd sz = sol->tail(nz);
    const double scale = 1.0 + sol->cwiseAbs().maxCoeff();
    if (x.size() && x.minCoeff() < -tol * scale) continue;
    if ((A * x - p.b()).minCoeff() < -tol * scale) continue;
    if (na && ya.minCoeff() < -tol * scale) continue;
    if (nz && sz.minCoeff() < -tol * scale) continue;
    const double value = 0.5 * x.dot(Q * x) + p.c().dot(x);
    if (!best || value < best->objective) {
      ReferenceResult r;
      r.status = ReferenceStatus::Optimal;
      r.x = x.cwiseMax(0.0);
      r.y = VectorXd::Zero(m);
      for (int k = 0; k < na; ++k) r.y[active[k]] = std::max(ya[k], 0.0);
      r.objective = value;
      best = std::move(r);
    }
  }
  if (best) return *best;
  ReferenceResult r;
  r.status = ReferenceStatus::Unbounded;
  r.message = "feasible but no complementarity pattern admits a KKT point";
  return r;
}

double capped_exp(double v, double cap) { return std::exp(std::min(v, cap)); }

/// Primal-dual interior point method for min sum exp(x_i) subject to
/// A x - w = b, x >= 0, w >= 0. Multipliers: y for the equality (y >= 0 at
/// the solution since it also prices w), s for x >= 0.
ReferenceResult solve_expsum(const ConvexProgram& p, const ReferenceOptions& options) {
  const int n = p.n(), m = p.m();
  if (!affine_feasible(p.A(), p.b(), options)) return infeasible_result();
  const MatrixXd& A = p.A();
  const VectorXd& b = p.b();
  const double cap = p.exp_cap();

  VectorXd x = VectorXd::Ones(n);
  VectorXd w = (A * x - b).cwiseMax(1.0);
  VectorXd y = VectorXd::Ones(m);
  VectorXd s = VectorXd::Ones(n);

  auto residuals = [&](const VectorXd& xx, const VectorXd& ww, const VectorXd& yy,
                       const VectorXd& ss, double target) {
    VectorXd grad(n);
    for (int i = 0; i < n; ++i) grad[i] = capped_exp(xx[i], cap);
    VectorXd r(2 * n + 2 * m);
    r << grad - A.transpose() * yy - ss, A * xx - ww - b,
        xx.cwiseProduct(ss).array() - target, ww.cwiseProduct(yy).array() - target;
    return r;
  };

  const double sigma = 0.1;
  for (int iter = 0; iter < options.max_barrier_iterations; ++iter) {
    const double mu = (x.dot(s) + w.dot(y)) / (n + m);
    VectorXd grad(n);
    for (int i = 0; i < n; ++i) grad[i] = capped_exp(x[i], cap);
    const VectorXd r_d = grad - A.transpose() * y - s;
    const VectorXd r_p = A * x - w - b;
    const double scale = 1.0 + grad.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff();
    if (mu <= options.barrier_gap && r_d.lpNorm<Eigen::Infinity>() <= 1e-12 * scale &&
        r_p.lpNorm<Eigen::Infinity>() <= 1e-12 * scale) {
      ReferenceResult r;
      r.status = ReferenceStatus::Optimal;
      r.x = x;
      r.y = y;
      r.objective = grad.sum();
      return r;
    }
    const double target = sigma * mu;
    // Reduced system in (dx, dy):
    //   (H + S/X) dx - A^T dy = -r_d + target/x - s
    //   A dx + (W/Y) dy      = -r_p + target/y - w
    MatrixXd K(n + m, n + m);
    K.topLeftCorner(n, n) = grad.asDiagonal();
    K.topLeftCorner(n, n).diagonal() += s.cwiseQuotient(x);
    K.topRightCorner(n, m) = -A.transpose();
    K.bottomLeftCorner(m, n) = A;
    K.bottomRightCorner(m, m) = w.cwiseQuotient(y).asDiagonal();
    VectorXd rhs(n + m);
    rhs << -r_d + (target / x.array()).matrix() - s, -r_p + (target / y.array()).matrix() - w;
    const VectorXd step = Eigen::PartialPivLU<MatrixXd>(K).solve(rhs);
    const VectorXd dx = step.head(n);
    const VectorXd dy = step.tail(m);
    const VectorXd ds = ((target - (x.cwiseProduct(s)).array()) / x.array()).matrix() -
                        s.cwiseQuotient(x).cwiseProduct(dx);
    const VectorXd dw = ((target - (w.cwiseProduct(y)).array()) / y.array()).matrix() -
                        w.cwiseQuotient(y).cwiseProduct(dy);

    auto max_step = [](const VectorXd& v, const VectorXd& dv) {
      double a = 1.0;
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -0.995 * v[i] / dv[i]);
      return a;
    };
    double alpha = std::min({max_step(x, dx), max_step(w, dw), max_step(y, dy), max_step(s, ds)});
    const double r0 = residuals(x, w, y, s, target).norm();
    // Backtrack on the perturbed KKT residual; exp() can make full steps overshoot.
    while (alpha > 1e-12) {
      const double r1 = residuals(x + alpha * dx, w + alpha * dw, y + alpha * dy, s + alpha * ds,
                                  target).norm();
      if (std::isfinite(r1) && r1 <= (1.0 - 1e-4 * alpha) * r0) break;
      alpha *= 0.5;
    }
    if (!(alpha > 1e-12)) break;
    x += alpha * dx;
    w += alpha * dw;
    y += alpha * dy;
    s += alpha * ds;
  }
  ReferenceResult r;
  r.status = ReferenceStatus::Unavailable;
  r.message = "barrier method did not reach the target gap";
  return r;
}

}  // namespace

std::string_view to_string(ReferenceStatus status) {
  switch (status) {
    case ReferenceStatus::Optimal:
      return "optimal";
    case ReferenceStatus::Infeasible:
      return "infeasible";
    case ReferenceStatus::Unbounded:
      return "unbounded";
    case ReferenceStatus::Unavailable:
      return "unavailable";
  }
  return "unknown";
}

bool affine_feasible(const MatrixXd& A, const VectorXd& b, const ReferenceOptions& options) {
  MatrixXd G;
  VectorXd h;
  primal_system(A, b, G, h);
  return best_vertex(G, h, VectorXd::Zero(A.cols()), options).has_value();
}

ReferenceResult reference_solution(const ConvexProgram& program, const ReferenceOptions& options) {
  try {
    switch (program.family()) {
      case Family::Lp:
        return solve_lp(program, options);
      case Family::Qp:
        return solve_qp(program, options);
      case Family::ExpSum:
        return solve_expsum(program, options);
      case Family::GenericOracle:
        break;
    }
  } catch (const UnsupportedError& e) {
    ReferenceResult r;
    r.message = e.what();
    return r;
  }
  ReferenceResult r;
  r.message = "no reference method for generic programs";
  return r;
}

}  // namespace ftopt::harness
