#include "ftopt/errors.hpp"
#include "ftopt/flows.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ftopt;
using std::numbers::pi;

namespace {

/// Classical RK4 on r' = -k (r^(1-a) + r^(1+a)), a = 2/mu.
double radial_rk4(double r0, double k, double mu, double t, int steps) {
  const double a = 2.0 / mu;
  auto f = [&](double r) { return -k * (std::pow(r, 1 - a) + std::pow(r, 1 + a)); };
  const double h = t / steps;
  double r = r0;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(r), k2 = f(r + 0.5 * h * k1), k3 = f(r + 0.5 * h * k2),
                 k4 = f(r + h * k3);
    r += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return r;
}

VectorXd v2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("gain prescriptions") {
  CHECK(prescribe_gain(1.0, 2.0, FlowScheme::FullHMCP) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(prescribe_gain(1.0, 2.0, FlowScheme::ReducedZ) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(prescribe_gain(2.0, 2.0, FlowScheme::NewtonFlow) == doctest::Approx(pi / 4).epsilon(1e-15));
  CHECK(prescribe_gain(1.0, 2.0, FlowScheme::GradientFlow, 1.0) ==
        doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(prescribe_gain(1.0, 3.0, FlowScheme::GradientFlow, 0.5) ==
        doctest::Approx(3 * pi / 2).epsilon(1e-15));
  CHECK_THROWS_AS(prescribe_gain(1.0, 2.0, FlowScheme::GradientFlow), DomainError);
  CHECK_THROWS_AS(prescribe_gain(0.0, 2.0, FlowScheme::FullHMCP), DomainError);
  CHECK_THROWS_AS(prescribe_gain(1.0, 1.0, FlowScheme::FullHMCP), DomainError);
  const FlowConfig cfg = FlowConfig::from_settling_time(0.5, 2.0, FlowScheme::FullHMCP);
  CHECK(cfg.k == doctest::Approx(pi));
}

TEST_CASE("reduced rhs") {
  CHECK(reduced_rhs(v2(1, 0), 1.0, 2.0) == v2(-2, 0));
  const VectorXd d = reduced_rhs(v2(3, 4), 1.0, 2.0);
  CHECK(d[0] == doctest::Approx(-15.6).epsilon(1e-15));
  CHECK(d[1] == doctest::Approx(-20.8).epsilon(1e-15));
  CHECK(reduced_rhs(v2(0, 0), 1.0, 2.0).isZero(0.0));
  std::mt19937_64 rng(50);
  for (int k = 0; k < 100; ++k) {
    const VectorXd z = test::random_normal(rng, 6);
    const VectorXd zd = reduced_rhs(z, 0.7, 2.5);
    CHECK(z.dot(zd) < 0.0);
    const double r = z.norm(), a = 2.0 / 2.5;
    CHECK(zd.norm() == doctest::Approx(0.7 * (std::pow(r, 1 - a) + std::pow(r, 1 + a))));
  }
}

TEST_CASE("radial closed form at mu = 2") {
  const double k = pi / 2;
  CHECK(radial_norm_closed_form(1.0, k, 0.25) == doctest::Approx(std::tan(pi / 8)).epsilon(1e-15));
  CHECK(std::abs(radial_norm_closed_form(1.0, k, 0.25) - radial_rk4(1.0, k, 2.0, 0.25, 20000)) <=
        1e-10);
  CHECK(radial_norm_closed_form(1.0, k, 0.5) == 0.0);
  CHECK(radial_norm_closed_form(1.0, k, 0.9) == 0.0);
  CHECK(radial_settling_time(1.0, k) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(radial_settling_time(1e12, k) < 1.0);
}

TEST_CASE("radial closed form for other exponents agrees with quadrature") {
  for (double mu : {1.5, 3.0, 4.0}) {
    for (double r0 : {0.3, 2.0, 40.0}) {
      const double k = 1.1;
      const double ts = radial_settling_time(r0, k, mu);
      for (double frac : {0.1, 0.5, 0.8}) {
        const double t = frac * ts;
        const double exact = radial_norm_closed_form(r0, k, t, mu);
        const double quad = radial_rk4(r0, k, mu, t, 40000);
        CHECK(std::abs(exact - quad) <= 1e-8 * std::max(1e-3, exact));
      }
      CHECK(radial_norm_closed_form(r0, k, ts * 1.0000001, mu) == 0.0);
    }
  }
}

TEST_CASE("settling bounds") {
  CHECK(settling_bound(FixedTimeTanBound{pi / 2, pi / 2, 2.0}) == doctest::Approx(4.0));
  CHECK(settling_bound(FixedTimeSumBound{1, 1, 0.5, 2}) == doctest::Approx(3.0));
  CHECK(settling_bound(FiniteTimeBound{1, 1, 0.5}) == doctest::Approx(2.0));
  CHECK(settling_bound(ResidualFlowBound{pi / 2, 2.0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(settling_bound(FiniteTimeBound{1, 1, 1.5}), DomainError);
  CHECK_THROWS_AS(settling_bound(FixedTimeSumBound{1, 1, 0.5, 0.9}), DomainError);
  CHECK_THROWS_AS(settling_bound(FixedTimeTanBound{1, 1, 1.0}), DomainError);
  // the numeric settling time never exceeds mu pi / (4k)
  for (double r0 : {1e-3, 1.0, 1e3, 1e9})
    CHECK(radial_settling_time(r0, pi / 2) <= settling_bound(ResidualFlowBound{pi / 2, 2.0}));
}

TEST_CASE("full HMCP rhs at an equilibrium is zero") {
  const ConvexProgram p =
      make_lp(VectorXd::Ones(1), MatrixXd::Ones(1, 1), VectorXd::Ones(1));
  const HMCPState st{VectorXd::Ones(3), VectorXd::Zero(3)};
  const HmcpDerivative d = full_hmcp_rhs(p, st, 1.0, 2.0);
  CHECK(d.z_norm == 0.0);
  CHECK(d.x_hat_dot.isZero(0.0));
  CHECK(d.s_hat_dot.isZero(0.0));
}

TEST_CASE("full HMCP rhs solves the block system") {
  std::mt19937_64 rng(51);
  for (Family f : test::kFamilies) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const ConvexProgram p = test::random_program(f, 900 + s);
      const int N = p.n() + p.m() + 1;
      HMCPState st = s == 0 ? HMCPState::uniform(p.n(), p.m(), 1.0)
                            : HMCPState{test::random_positive(rng, N), test::random_positive(rng, N)};
      const double k = pi / 2, mu = 2.0;
      const HmcpDerivative d = full_hmcp_rhs(p, st, k, mu);
      const VectorXd z = residual_z(p, st);
      const double c = contraction_rate(z.norm(), k, mu);
      const MatrixXd G = psi_jacobian(p, st.x_hat);
      const VectorXd lhs1 = G * d.x_hat_dot - d.s_hat_dot;
      const VectorXd lhs2 = st.s_hat.cwiseProduct(d.x_hat_dot) + st.x_hat.cwiseProduct(d.s_hat_dot);
      CHECK((lhs1 + c * z.head(N)).norm() <= 1e-10 * c * z.norm());
      CHECK((lhs2 + c * z.tail(N)).norm() <= 1e-10 * c * z.norm());
    }
  }
}

TEST_CASE("z follows the reduced dynamics along the full flow") {
  std::mt19937_64 rng(52);
  for (Family f : test::kFamilies) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const ConvexProgram p = test::random_program(f, 950 + s);
      const int N = p.n() + p.m() + 1;
      const HMCPState st{test::random_positive(rng, N, 0.5, 2.0),
                         test::random_positive(rng, N, 0.5, 2.0)};
      const double k = 1.3, mu = 2.0;
      const HmcpDerivative d = full_hmcp_rhs(p, st, k, mu);
      const double h = 1e-6;
      auto at = [&](double t) {
        return residual_z(p, HMCPState{st.x_hat + t * d.x_hat_dot, st.s_hat + t * d.s_hat_dot});
      };
      const VectorXd zdot = (at(h) - at(-h)) / (2 * h);
      const VectorXd expect = reduced_rhs(residual_z(p, st), k, mu);
      CHECK((zdot - expect).norm() <= 1e-6 * expect.norm());
      CHECK(residual_z(p, st).dot(zdot) < 0.0);
    }
  }
}

TEST_CASE("full HMCP rhs domain checks") {
  const ConvexProgram p = test::random_program(Family::Lp, 53);
  HMCPState st = HMCPState::uniform(p.n(), p.m(), 1.0);
  st.x_hat[0] = 0.0;
  CHECK_THROWS_AS(full_hmcp_rhs(p, st, 1.0, 2.0), DomainError);
  st = HMCPState::uniform(p.n(), p.m(), 1.0);
  st.s_hat[0] = -1e-3;
  CHECK_THROWS_AS(full_hmcp_rhs(p, st, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(full_hmcp_rhs(p, HMCPState::uniform(1, 1, 1.0), 1.0, 2.0), DimensionError);
  CHECK_THROWS_AS(full_hmcp_rhs(p, HMCPState::uniform(p.n(), p.m(), 1.0), -1.0, 2.0),
                  DomainError);
}

TEST_CASE("gradient and Newton flows") {
  CHECK(gradient_flow_rhs(v2(1, 0), 1.0, 2.0) == v2(-2, 0));
  std::mt19937_64 rng(54);
  for (int k = 0; k < 20; ++k) {
    const VectorXd g = test::random_normal(rng, 4);
    const VectorXd xd = gradient_flow_rhs(g, 0.9, 2.0);
    CHECK(std::abs(xd.dot(g) + xd.norm() * g.norm()) <= 1e-12 * xd.norm() * g.norm());
    CHECK((newton_flow_rhs(g, MatrixXd::Identity(4, 4), 0.9, 2.0) - xd).norm() <=
          1e-14 * xd.norm());
    MatrixXd M = test::random_normal(rng, 16).reshaped(4, 4);
    const MatrixXd H = M.transpose() * M + MatrixXd::Identity(4, 4);
    const VectorXd nd = newton_flow_rhs(g, H, 0.9, 2.0);
    CHECK((H * nd - xd).norm() <= 1e-12 * xd.norm());
  }
  MatrixXd singular = MatrixXd::Zero(2, 2);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(newton_flow_rhs(v2(1, 1), singular, 1.0, 2.0), DegenerateStateError);
  CHECK_THROWS_AS(newton_flow_rhs(v2(1, 1), MatrixXd::Identity(3, 3), 1.0, 2.0), DimensionError);
  CHECK(newton_flow_rhs(v2(0, 0), singular, 1.0, 2.0).isZero(0.0));
}
