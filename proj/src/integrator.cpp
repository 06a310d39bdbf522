#include "ftopt/integrator.hpp"

#include "ftopt/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace ftopt {

namespace {

using Eigen::MatrixXd;

// Hairer & Wanner, Solving ODEs II, Table IV.6.5.
constexpr SdirkTableau kSdirk4{
    0.25,
    {{1.0 / 4, 0, 0, 0, 0},
     {1.0 / 2, 1.0 / 4, 0, 0, 0},
     {17.0 / 50, -1.0 / 25, 1.0 / 4, 0, 0},
     {371.0 / 1360, -137.0 / 2720, 15.0 / 544, 1.0 / 4, 0},
     {25.0 / 24, -49.0 / 48, 125.0 / 16, -85.0 / 12, 1.0 / 4}},
    {1.0 / 4, 3.0 / 4, 11.0 / 20, 1.0 / 2, 1.0},
    {25.0 / 24, -49.0 / 48, 125.0 / 16, -85.0 / 12, 1.0 / 4},
    {59.0 / 48, -17.0 / 96, 225.0 / 32, -85.0 / 12, 0.0}};

constexpr int kMaxNewtonIterations = 10;
constexpr double kNewtonTolerance = 0.03;  // in units of the error weights
constexpr double kSafety = 0.9;
constexpr double kMinShrink = 0.2;
constexpr double kMaxGrowth = 4.0;

double scaled_rms(const VectorXd& v, const VectorXd& reference, double atol, double rtol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double w = atol + rtol * std::abs(reference[i]);
    const double q = v[i] / w;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(v.size(), 1)));
}

struct StepOutput {
  VectorXd y;
  VectorXd error;
};

class Stepper {
 public:
  Stepper(const OdeSystem& system, const IntegratorConfig& config, IntegratorStats& stats)
      : system_(system), config_(config), stats_(stats) {}

  VectorXd rhs(const VectorXd& y) {
    ++stats_.rhs_evaluations;
    VectorXd f = system_.rhs(y);
    if (f.size() != y.size()) throw DimensionError("rhs returned a vector of the wrong length");
    if (!f.allFinite()) throw DegenerateStateError("rhs returned non-finite values");
    return f;
  }

  /// Forward differences; a component whose forward perturbation leaves the
  /// domain of F is retried backwards.
  MatrixXd jacobian(const VectorXd& y, const VectorXd& fy) {
    ++stats_.jacobian_evaluations;
    const Eigen::Index n = y.size();
    const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    MatrixXd J(n, n);
    VectorXd yp = y;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double delta = root_eps * std::max(std::abs(y[j]), config_.abs_tol);
      VectorXd column;
      for (double sign : {1.0, -1.0}) {
        yp[j] = y[j] + sign * delta;
        try {
          column = (rhs(yp) - fy) / (sign * delta);
          break;
        } catch (const Error&) {
          if (sign < 0.0) throw;
        }
      }
      yp[j] = y[j];
      J.col(j) = column;
    }
    return J;
  }

  /// One SDIRK step of size h; nullopt when the stage iterations fail.
  std::optional<StepOutput> attempt(const VectorXd& y, const VectorXd& fy, const MatrixXd& J,
                                    double h) {
    const SdirkTableau& tab = kSdirk4;
    const Eigen::Index n = y.size();
    const double hg = h * tab.gamma;
    const MatrixXd iteration_matrix = MatrixXd::Identity(n, n) - hg * J;
    if (!iteration_matrix.allFinite()) return std::nullopt;
    const Eigen::PartialPivLU<MatrixXd> lu(iteration_matrix);

    std::array<VectorXd, SdirkTableau::stages> K;
    VectorXd Y;
    try {
      for (int i = 0; i < SdirkTableau::stages; ++i) {
        VectorXd base = y;
        for (int j = 0; j < i; ++j) base += (h * tab.a[i][j]) * K[j];
        Y = base + hg * (i == 0 ? fy : K[i - 1]);

        bool converged = false;
        double previous = 0.0;
        for (int it = 0; it < kMaxNewtonIterations; ++it) {
          const VectorXd G = Y - hg * rhs(Y) - base;
          const VectorXd delta = lu.solve(-G);
          Y += delta;
          if (!Y.allFinite()) return std::nullopt;
          const double dn = scaled_rms(delta, Y, config_.abs_tol, config_.rel_tol);
          if (dn <= 0.1 * kNewtonTolerance) {
            converged = true;
            break;
          }
          if (it > 0) {
            const double theta = dn / previous;
            if (theta >= 0.99) return std::nullopt;
            if (theta / (1.0 - theta) * dn <= kNewtonTolerance) {
              converged = true;
              break;
            }
          }
          previous = dn;
        }
        if (!converged) return std::nullopt;
        K[i] = (Y - base) / hg;
      }
    } catch (const Error&) {
      return std::nullopt;
    }

    VectorXd raw_error = VectorXd::Zero(n);
    for (int i = 0; i < SdirkTableau::stages; ++i) {
      raw_error += (h * (tab.b[i] - tab.b_hat[i])) * K[i];
    }
    // Stiffly accurate: the last stage is the step result.
    return StepOutput{std::move(Y), lu.solve(raw_error)};
  }

 private:
  const OdeSystem& system_;
  const IntegratorConfig& config_;
  IntegratorStats& stats_;
};

}  // namespace

const SdirkTableau& sdirk4_tableau() { return kSdirk4; }

std::string_view to_string(StopEvent event) {
  switch (event) {
    case StopEvent::ReachedEnd:
      return "reached_end";
    case StopEvent::ResidualSettled:
      return "residual_settled";
    case StopEvent::StepFailure:
      return "step_failure";
  }
  return "unknown";
}

void validate(const IntegratorConfig& config) {
  if (!(config.rel_tol >= 1e-14)) throw DomainError("rel_tol must be >= 1e-14");
  if (!(config.abs_tol > 0.0)) throw DomainError("abs_tol must be positive");
  if (!(config.stop_residual > 0.0)) throw DomainError("stop_residual must be positive");
  if (config.max_steps < 1) throw DomainError("max_steps must be positive");
  if (config.initial_step && !(*config.initial_step > 0.0)) {
    throw DomainError("initial_step must be positive");
  }
  if (config.sample_count < 2) throw DomainError("sample_count must be at least 2");
  if (!(config.event_time_tol > 0.0)) throw DomainError("event_time_tol must be positive");
}

Trajectory integrate(const OdeSystem& system, const VectorXd& y0, double t_end,
                     const IntegratorConfig& config) {
  validate(config);
  if (!system.rhs) throw DomainError("integrate: system has no rhs");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be positive");
  if (!y0.allFinite()) throw DomainError("initial state must be finite");

  Trajectory tr;
  Stepper stepper(system, config, tr.stats);

  const int samples = config.sample_count;
  auto sample_time = [&](int i) {
    return i == samples - 1 ? t_end : t_end * static_cast<double>(i) / (samples - 1);
  };
  auto residual = [&](const VectorXd& y) {
    return system.residual_norm ? system.residual_norm(y)
                                : std::numeric_limits<double>::quiet_NaN();
  };
  auto record = [&](double t, const VectorXd& y, double r) {
    if (!tr.times.empty() && t <= tr.times.back()) return;
    tr.times.push_back(t);
    tr.states.push_back(y);
    tr.residual_norms.push_back(r);
  };
  auto finish = [&](StopEvent event, double t, const VectorXd& y, double r) {
    tr.stop = event;
    tr.final_time = t;
    tr.final_state = y;
    tr.final_residual = r;
  };
  // Holds the settled state over the remaining output times.
  auto settle = [&](double t, const VectorXd& y, double r) {
    tr.settle_time = t;
    for (int i = 1; i < samples; ++i) {
      if (sample_time(i) >= t) record(sample_time(i), y, r);
    }
    finish(StopEvent::ResidualSettled, t, y, r);
  };
  auto fail = [&](double t, const VectorXd& y, double r, std::string why) {
    record(t, y, r);
    tr.failure = std::move(why);
    finish(StopEvent::StepFailure, t, y, r);
  };

  VectorXd y = y0;
  double t = 0.0;
  double r = 0.0;
  tr.min_component = y.size() > 0 ? y.minCoeff() : 0.0;
  try {
    r = residual(y);
  } catch (const Error& e) {
    record(0.0, y, std::numeric_limits<double>::quiet_NaN());
    fail(0.0, y, std::numeric_limits<double>::quiet_NaN(),
         std::string("residual undefined at the initial state: ") + e.what());
    return tr;
  }
  record(0.0, y, r);
  if (system.residual_norm && r < config.stop_residual) {
    settle(0.0, y, r);
    return tr;
  }

  VectorXd fy;
  try {
    fy = stepper.rhs(y);
  } catch (const Error& e) {
    fail(0.0, y, r, std::string("rhs undefined at the initial state: ") + e.what());
    return tr;
  }

  const double h_min = 1e-15 * t_end;
  double h = config.initial_step.value_or(1e-6 * t_end);
  int next_sample = 1;

  while (true) {
    if (tr.stats.accepted_steps >= config.max_steps) {
      fail(t, y, r, "maximum number of steps exceeded");
      return tr;
    }

    MatrixXd J;
    try {
      J = stepper.jacobian(y, fy);
    } catch (const Error& e) {
      fail(t, y, r, std::string("jacobian evaluation failed: ") + e.what());
      return tr;
    }

    const double target = sample_time(next_sample);
    const double h_requested = h;
    double h_try = std::min(h, target - t);
    bool first_attempt = true;
    std::optional<StepOutput> step;
    VectorXd f_new;
    double r_new = 0.0;
    double err_norm = 0.0;

    while (true) {
      if (h_try < h_min) {
        fail(t, y, r, "step size underflow");
        return tr;
      }
      step = stepper.attempt(y, fy, J, h_try);
      bool ok = step.has_value();
      if (ok) {
        VectorXd reference = y.cwiseAbs().cwiseMax(step->y.cwiseAbs());
        err_norm = scaled_rms(step->error, reference, config.abs_tol, config.rel_tol);
        if (!(err_norm <= 1.0)) {
          ++tr.stats.rejected_steps;
          const double shrink =
              std::isfinite(err_norm)
                  ? std::max(kMinShrink, kSafety * std::pow(err_norm, -0.25))
                  : kMinShrink;
          h_try *= shrink;
          first_attempt = false;
          continue;
        }
        if (system.nonnegative && step->y.minCoeff() < config.positivity_floor) ok = false;
      }
      if (ok) {
        try {
          f_new = stepper.rhs(step->y);
          r_new = residual(step->y);
        } catch (const Error&) {
          ok = false;
        }
      }
      if (!ok) {
        ++tr.stats.rejected_steps;
        h_try *= 0.5;
        first_attempt = false;
        continue;
      }
      break;
    }

    const bool landed = h_try >= target - t;
    const double growth =
        err_norm > 0.0 ? std::min(kMaxGrowth, std::max(kMinShrink, kSafety * std::pow(err_norm, -0.25)))
                       : kMaxGrowth;
    h = h_try * growth;
    if (landed && first_attempt) h = std::max(h, h_requested);

    if (system.residual_norm && r_new < config.stop_residual) {
      // Bisect on the step length from the last accepted state.
      double lo = 0.0;
      double hi = h_try;
      VectorXd y_hi = step->y;
      double r_hi = r_new;
      while (hi - lo > config.event_time_tol) {
        const double mid = 0.5 * (lo + hi);
        auto trial = stepper.attempt(y, fy, J, mid);
        double r_mid = std::numeric_limits<double>::quiet_NaN();
        if (trial && !(system.nonnegative && trial->y.minCoeff() < config.positivity_floor)) {
          try {
            r_mid = residual(trial->y);
          } catch (const Error&) {
          }
        }
        if (std::isfinite(r_mid)) {
          if (r_mid < config.stop_residual) {
            hi = mid;
            y_hi = std::move(trial->y);
            r_hi = r_mid;
          } else {
            lo = mid;
          }
        } else {
          break;  // keep the bracket; y_hi still matches t + hi
        }
      }
      ++tr.stats.accepted_steps;
      tr.min_component = std::min(tr.min_component, y_hi.minCoeff());
      settle(landed && hi == h_try ? target : t + hi, y_hi, r_hi);
      return tr;
    }

    ++tr.stats.accepted_steps;
    t = landed ? target : t + h_try;
    y = std::move(step->y);
    fy = std::move(f_new);
    r = r_new;
    tr.min_component = std::min(tr.min_component, y.minCoeff());

    if (landed) {
      record(t, y, r);
      if (++next_sample == samples) {
        finish(StopEvent::ReachedEnd, t, y, r);
        return tr;
      }
    }
  }
}

}  // namespace ftopt
