#pragma once

// Adaptive implicit integration of autonomous systems y' = F(y).
//
// The stepper is the five-stage, L-stable, stiffly accurate SDIRK method of
// order 4 with an embedded order-3 solution (gamma = 1/4). Stage equations are
// solved by simplified Newton with a forward-difference Jacobian taken at the
// start of every step. Steps land exactly on the output sample times, so no
// interpolation is involved in the sampled trajectory.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ftopt {

using Eigen::VectorXd;

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double stop_residual = 1e-10;   // event: residual_norm(y) < stop_residual
  std::int64_t max_steps = 1'000'000;
  std::optional<double> initial_step;  // default 1e-6 * t_end
  int sample_count = 200;              // uniform output times in [0, t_end]
  double positivity_floor = -1e-9;     // used when the system is nonnegative
  double event_time_tol = 1e-9;        // bracket width for the stop event
};

/// Throws DomainError when a field is out of range.
void validate(const IntegratorConfig& config);

struct OdeSystem {
  std::function<VectorXd(const VectorXd&)> rhs;
  /// Optional event functional; integration stops once it drops below
  /// IntegratorConfig::stop_residual.
  std::function<double(const VectorXd&)> residual_norm;
  /// Reject steps that leave the nonnegative orthant by more than
  /// IntegratorConfig::positivity_floor.
  bool nonnegative = false;
};

enum class StopEvent { ReachedEnd, ResidualSettled, StepFailure };

std::string_view to_string(StopEvent event);

struct IntegratorStats {
  std::int64_t accepted_steps = 0;
  std::int64_t rejected_steps = 0;
  std::int64_t rhs_evaluations = 0;
  std::int64_t jacobian_evaluations = 0;
};

struct Trajectory {
  std::vector<double> times;             // strictly increasing
  std::vector<VectorXd> states;
  std::vector<double> residual_norms;    // NaN when no residual is given
  StopEvent stop = StopEvent::ReachedEnd;
  std::optional<double> settle_time;     // set for ResidualSettled
  double final_time = 0.0;               // t_end, the event time, or the failure time
  VectorXd final_state;
  double final_residual = 0.0;
  std::string failure;                   // reason for StepFailure
  double min_component = 0.0;            // over every accepted state
  IntegratorStats stats;
};

/// Butcher tableau of the stepper, exposed for order-condition checks.
struct SdirkTableau {
  static constexpr int stages = 5;
  double gamma;
  double a[5][5];
  double c[5];
  double b[5];
  double b_hat[5];  // embedded order-3 weights
};

const SdirkTableau& sdirk4_tableau();

/// Integrates from t = 0 to t_end. After a ResidualSettled event the state is
/// held fixed for the remaining sample times. A StepFailure returns the
/// partial trajectory up to the last accepted state.
Trajectory integrate(const OdeSystem& system, const VectorXd& y0, double t_end,
                     const IntegratorConfig& config = {});

}  // namespace ftopt
