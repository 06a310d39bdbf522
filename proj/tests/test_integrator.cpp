#include "ftopt/errors.hpp"
#include "ftopt/flows.hpp"
#include "ftopt/integrator.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ftopt;
using std::numbers::pi;

namespace {

VectorXd scalar(double v) { return VectorXd::Constant(1, v); }

}  // namespace

TEST_CASE("tableau satisfies the order conditions") {
  const SdirkTableau& t = sdirk4_tableau();
  constexpr int s = SdirkTableau::stages;
  auto sum = [&](auto term) {
    double acc = 0.0;
    for (int i = 0; i < s; ++i) acc += term(i);
    return acc;
  };
  auto ac = [&](int i, auto g) {
    double acc = 0.0;
    for (int j = 0; j < s; ++j) acc += t.a[i][j] * g(j);
    return acc;
  };
  for (int i = 0; i < s; ++i) {
    CHECK(sum([&](int j) { return t.a[i][j]; }) == doctest::Approx(t.c[i]).epsilon(1e-14));
    CHECK(t.a[i][i] == t.gamma);
    CHECK(t.a[s - 1][i] == t.b[i]);
  }
  auto c = [&](int j) { return t.c[j]; };
  auto c2 = [&](int j) { return t.c[j] * t.c[j]; };
  for (const double* w : {t.b, t.b_hat}) {
    CHECK(sum([&](int i) { return w[i]; }) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sum([&](int i) { return w[i] * t.c[i]; }) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sum([&](int i) { return w[i] * c2(i); }) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(sum([&](int i) { return w[i] * ac(i, c); }) == doctest::Approx(1.0 / 6).epsilon(1e-14));
  }
  const double* b = t.b;
  CHECK(sum([&](int i) { return b[i] * std::pow(t.c[i], 3); }) ==
        doctest::Approx(0.25).epsilon(1e-14));
  CHECK(sum([&](int i) { return b[i] * t.c[i] * ac(i, c); }) ==
        doctest::Approx(1.0 / 8).epsilon(1e-14));
  CHECK(sum([&](int i) { return b[i] * ac(i, c2); }) == doctest::Approx(1.0 / 12).epsilon(1e-14));
  CHECK(sum([&](int i) { return b[i] * ac(i, [&](int j) { return ac(j, c); }); }) ==
        doctest::Approx(1.0 / 24).epsilon(1e-14));
}

TEST_CASE("exponential decay") {
  OdeSystem sys;
  sys.rhs = [](const VectorXd& y) { return VectorXd(-y); };
  const Trajectory tr = integrate(sys, scalar(1.0), 1.0);
  CHECK(tr.stop == StopEvent::ReachedEnd);
  CHECK(tr.final_time == 1.0);
  CHECK(std::abs(tr.final_state[0] - std::exp(-1.0)) <= 1e-8);
  REQUIRE(tr.times.size() == 200);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == 1.0);
  for (std::size_t i = 1; i < tr.times.size(); ++i) {
    CHECK(tr.times[i] > tr.times[i - 1]);
    CHECK(std::abs(tr.states[i][0] - std::exp(-tr.times[i])) <= 1e-8);
  }
  CHECK(std::isnan(tr.residual_norms.front()));
}

TEST_CASE("scalar radial law and its settling event") {
  const double k = pi / 2;
  OdeSystem sys;
  sys.rhs = [k](const VectorXd& r) { return VectorXd(-k * (1.0 + r.array().square()).matrix()); };
  // signed, so the zero crossing inside a step still trips the event
  sys.residual_norm = [](const VectorXd& r) { return r[0]; };
  IntegratorConfig cfg;
  cfg.sample_count = 5;  // 0, 0.25, 0.5, 0.75, 1
  const Trajectory tr = integrate(sys, scalar(1.0), 1.0, cfg);
  REQUIRE(tr.times.size() >= 2);
  CHECK(tr.times[1] == 0.25);
  CHECK(std::abs(tr.states[1][0] - std::tan(pi / 8)) <= 1e-8);
  REQUIRE(tr.stop == StopEvent::ResidualSettled);
  CHECK(std::abs(*tr.settle_time - 0.5) <= 1e-6);
  CHECK(tr.final_residual < cfg.stop_residual);
  // frozen afterwards
  CHECK(tr.states.back() == tr.final_state);
  CHECK(tr.times.back() == 1.0);
}

TEST_CASE("reduced flow from z0 = 5e settles at atan(|z0|)/k") {
  const double k = pi / 2, mu = 2.0;
  OdeSystem sys;
  sys.rhs = [&](const VectorXd& z) { return reduced_rhs(z, k, mu); };
  sys.residual_norm = [](const VectorXd& z) { return z.norm(); };
  const VectorXd z0 = VectorXd::Constant(3, 5.0);
  const Trajectory tr = integrate(sys, z0, 1.0);
  REQUIRE(tr.stop == StopEvent::ResidualSettled);
  CHECK(std::abs(*tr.settle_time - radial_settling_time(z0.norm(), k)) <= 1e-6);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double law = radial_norm_closed_form(z0.norm(), k, tr.times[i]);
    if (law > 1e-6) CHECK(std::abs(tr.residual_norms[i] - law) <= 1e-5 * law);
    // direction is preserved
    if (tr.residual_norms[i] > 1e-8) {
      const double cosine = tr.states[i].dot(z0) / (tr.states[i].norm() * z0.norm());
      CHECK(cosine >= 1.0 - 1e-8);
    }
    if (i > 0) CHECK(tr.residual_norms[i] <= tr.residual_norms[i - 1] + 1e-9);
  }
}

TEST_CASE("start at equilibrium settles immediately") {
  OdeSystem sys;
  sys.rhs = [](const VectorXd& z) { return reduced_rhs(z, 1.0, 2.0); };
  sys.residual_norm = [](const VectorXd& z) { return z.norm(); };
  const Trajectory tr = integrate(sys, VectorXd::Zero(2), 1.0);
  CHECK(tr.stop == StopEvent::ResidualSettled);
  CHECK(*tr.settle_time == 0.0);
  CHECK(tr.times.size() == 200);
  CHECK(tr.stats.accepted_steps == 0);
}

TEST_CASE("stiff linear system") {
  Eigen::Matrix2d A;
  A << -1.0, 0.0, 1e5, -1e5;
  OdeSystem sys;
  sys.rhs = [A](const VectorXd& y) { return VectorXd(A * y); };
  VectorXd y0(2);
  y0 << 1.0, 0.0;
  const Trajectory tr = integrate(sys, y0, 10.0);
  REQUIRE(tr.stop == StopEvent::ReachedEnd);
  // y2 tracks y1 after the fast transient: y2 = y1 * 1e5/(1e5-1) asymptotically
  const double y1 = std::exp(-10.0);
  CHECK(std::abs(tr.final_state[0] - y1) <= 1e-9);
  CHECK(std::abs(tr.final_state[1] - y1 * 1e5 / (1e5 - 1)) <= 1e-9);
  CHECK(tr.stats.accepted_steps < 3000);
}

TEST_CASE("tightening tolerances converges") {
  OdeSystem sys;
  sys.rhs = [](const VectorXd& y) {
    VectorXd f(2);
    f << y[1], -std::sin(y[0]);
    return f;
  };
  VectorXd y0(2);
  y0 << 1.0, 0.0;
  IntegratorConfig loose;
  loose.rel_tol = 1e-6;
  loose.abs_tol = 1e-8;
  IntegratorConfig tight = loose;
  tight.rel_tol /= 2;
  tight.abs_tol /= 2;
  const VectorXd a = integrate(sys, y0, 3.0, loose).final_state;
  const VectorXd b = integrate(sys, y0, 3.0, tight).final_state;
  CHECK((a - b).lpNorm<Eigen::Infinity>() <= 10 * loose.rel_tol);
}

TEST_CASE("finite-time blow-up is reported as a step failure") {
  OdeSystem sys;
  sys.rhs = [](const VectorXd& y) { return VectorXd(y.array().square()); };
  const Trajectory tr = integrate(sys, scalar(1.0), 2.0);
  CHECK(tr.stop == StopEvent::StepFailure);
  // an implicit step may land past the singularity before failing
  CHECK(tr.final_time > 0.99);
  CHECK(tr.final_time < 2.0);
  CHECK_FALSE(tr.failure.empty());
}

TEST_CASE("max_steps is enforced") {
  OdeSystem sys;
  sys.rhs = [](const VectorXd& y) { return VectorXd(-y); };
  IntegratorConfig cfg;
  cfg.max_steps = 3;
  const Trajectory tr = integrate(sys, scalar(1.0), 1.0, cfg);
  CHECK(tr.stop == StopEvent::StepFailure);
  CHECK(tr.failure.find("maximum") != std::string::npos);
  CHECK(tr.stats.accepted_steps == 3);
}

TEST_CASE("positivity violations are rejected, not clipped") {
  OdeSystem sys;
  sys.rhs = [](const VectorXd& y) { return VectorXd::Constant(y.size(), -1.0); };
  sys.nonnegative = true;
  const Trajectory tr = integrate(sys, scalar(0.5), 1.0);
  CHECK(tr.stop == StopEvent::StepFailure);
  CHECK(tr.min_component >= -1e-9);
  CHECK(tr.final_time == doctest::Approx(0.5).epsilon(1e-6));
  for (const VectorXd& s : tr.states) CHECK(s.minCoeff() >= -1e-9);
}

TEST_CASE("rhs undefined at the start") {
  OdeSystem sys;
  sys.rhs = [](const VectorXd&) -> VectorXd { throw DomainError("outside the domain"); };
  const Trajectory tr = integrate(sys, scalar(1.0), 1.0);
  CHECK(tr.stop == StopEvent::StepFailure);
  CHECK(tr.failure.find("outside the domain") != std::string::npos);
}

TEST_CASE("config validation") {
  OdeSystem sys;
  sys.rhs = [](const VectorXd& y) { return VectorXd(-y); };
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-15;
  CHECK_THROWS_AS(integrate(sys, scalar(1.0), 1.0, cfg), DomainError);
  cfg = {};
  cfg.sample_count = 1;
  CHECK_THROWS_AS(integrate(sys, scalar(1.0), 1.0, cfg), DomainError);
  cfg = {};
  cfg.initial_step = -1.0;
  CHECK_THROWS_AS(integrate(sys, scalar(1.0), 1.0, cfg), DomainError);
  CHECK_THROWS_AS(integrate(sys, scalar(1.0), 0.0), DomainError);
  CHECK_THROWS_AS(integrate(sys, scalar(NAN), 1.0), DomainError);
  CHECK(to_string(StopEvent::ResidualSettled) == "residual_settled");
}
