// Trigger-event gradient framework. The outer loop holds an anchor iterate;
// an inner loop takes policy-sized gradient steps without evaluating the
// objective until a trigger fires (distance from the anchor, gradient norm
// leaving a band, or an iteration cap). Exactly one objective evaluation per
// outer iteration then drives a nonmonotone sufficient-decrease test and a
// three-way accept/reject branch that adapts the global step scaling delta.
#pragma once

#include <memory>
#include <optional>
#include <string>

#include "trigger_descent/oracle.hpp"
#include "trigger_descent/trace.hpp"

namespace trigger_descent {

enum class RunStatus { ConvergedGradient, StationaryExact, MaxOuterIterations, Failed };

const char* to_string(RunStatus s);

// ConvergedGradient and StationaryExact both count as successful
// terminations; the latter is the refinement for an exactly zero gradient.
inline bool is_successful(RunStatus s) {
  return s == RunStatus::ConvergedGradient || s == RunStatus::StationaryExact;
}

// How an outer decision went, from the policies' point of view. The gradient
// norm at the triggering point is re-tested against the current band to pick
// the acceptance branch, independently of which condition tripped the
// trigger first.
enum class AcceptOutcome { Rejected, AcceptedLow, AcceptedHigh, AcceptedNormal };

struct FrameworkConfig {
  double sigma_low = 0.5;               // delta shrink factor on rejection
  double sigma_upp = 1.5;               // delta growth factor on acceptance
  std::optional<double> delta_cap;      // clamp applied after growth
  int w = 10;                           // nonmonotone window length
  double rho = 1e-4;                    // sufficient-decrease relaxation
  double eps = 1e-5;                    // gradient stopping tolerance
  long long max_outer = 20000;
  double delta0 = 1.0;

  void validate() const;  // throws std::invalid_argument
};

struct TriggerThresholds {
  double iter_exit = 10.0;  // distance trigger, >= 0
  long long iter_max = 100; // inner-iteration cap, >= 1
  double gra_low = 0.0;     // gradient band (open interval), 0 < low < upp
  double gra_upp = 0.0;
};

// Objective values at the (at most w) most recent distinct iterates; the
// acceptance threshold is their maximum.
struct ObjectiveWindow {
  std::vector<double> values;
  double tau_obj = 0.0;

  void init(double f0) {
    values = {f0};
    tau_obj = f0;
  }
};

// Appends an accepted objective value, evicts the oldest entry beyond w, and
// recomputes the max. Call only on acceptance.
ObjectiveWindow update_window(const ObjectiveWindow& window,
                              double accepted_value, int w);

struct OuterState {
  long long k = 0;
  Vector theta;
  CachedGradient grad_theta;  // anchor gradient, kept across rejections
  double delta = 1.0;
  TriggerThresholds thresholds;
  ObjectiveWindow window;
  double first_inner_dir_derivative = 0.0;  // grad(theta_k) . gamma_0
  double first_inner_step = 0.0;            // alpha_0
};

struct StepContext {
  long long k = 0;
  long long j = 0;
  const Vector& anchor;
  double delta = 1.0;
  const TriggerThresholds& thresholds;
};

// Behavioral contract: direction() must be a descent direction proportional
// to the gradient scale, size() must stay within fixed positive bounds on
// bounded regions, and neither may call the objective oracle.
class StepPolicy {
 public:
  virtual ~StepPolicy() = default;
  virtual void begin_run(const Vector& theta0) { (void)theta0; }
  virtual void begin_inner(long long k, const Vector& theta,
                           const Vector& grad_theta, double grad_norm) {
    (void)k; (void)theta; (void)grad_theta; (void)grad_norm;
  }
  virtual Vector direction(const Vector& psi, const Vector& grad,
                           const StepContext& ctx) = 0;
  virtual double size(const Vector& psi, const Vector& grad, double grad_norm,
                      const StepContext& ctx) = 0;
  virtual void on_outcome(AcceptOutcome outcome) { (void)outcome; }
};

// Produces trigger thresholds for a (new) anchor without objective calls.
// Must keep 0 < gra_low < ||grad|| < gra_upp at selection time so the inner
// loop cannot trigger at j = 0.
class ThresholdPolicy {
 public:
  virtual ~ThresholdPolicy() = default;
  virtual TriggerThresholds initial(const Vector& theta0, double grad_norm) = 0;
  virtual TriggerThresholds select(const Vector& theta_new,
                                   double grad_norm_new,
                                   const TriggerThresholds& previous,
                                   AcceptOutcome outcome) = 0;
};

struct RunResult {
  RunStatus status = RunStatus::Failed;
  std::string failure_reason;  // nonempty iff status == Failed
  Vector terminal_point;
  double terminal_grad_norm = 0.0;
  EvalCounters counters;
  double wall_time_s = 0.0;
  RunTrace trace;
  long long outer_iterations = 0;
};

// First satisfied condition in fixed order: Distance (strict), GradientLow
// (<=), GradientHigh (>=), MaxInner (==); None otherwise.
TriggerReason check_trigger(const Vector& psi, const Vector& theta,
                            double grad_norm_psi, long long j,
                            const TriggerThresholds& th);

// Rejection test: F_psi >= tau_obj + rho * delta * alpha0 * dir_deriv0,
// boundary included. dir_deriv0 is negative for descent directions, so the
// right-hand side sits strictly below the threshold.
bool armijo_reject(double F_psi, const ObjectiveWindow& window, double rho,
                   double delta_k, double alpha0, double dir_deriv0);

// Candidate produced by the triggering inner iterate.
struct Candidate {
  const Vector& point;
  double objective;
  const Vector& grad;
  double grad_norm;
};

// Applies the three-way branch to the outer state:
//   rejected            -> theta unchanged, delta *= sigma_low, window kept;
//   accepted (low band) -> theta <- psi, delta unchanged, window updated;
//   accepted otherwise  -> theta <- psi, delta <- min(sigma_upp*delta, cap),
//                          window updated.
// Thresholds are re-selected through the policy unless select_thresholds is
// false (used when the run is about to terminate and no further inner loop
// will consume them).
void apply_outcome(OuterState& state, TriggerReason branch_reason,
                   bool rejected, const Candidate& cand,
                   const FrameworkConfig& config, ThresholdPolicy& th_policy,
                   bool select_thresholds = true);

// Full solve from theta0. Evaluates F(theta0) once to seed the window, then
// one objective evaluation per outer iteration; gradients are evaluated once
// per fresh inner point and reused for the trigger test, the step policy,
// the acceptance branch, and (on acceptance) the next anchor.
RunResult run(const Problem& problem, const Vector& theta0, StepPolicy& policy,
              ThresholdPolicy& th_policy, const FrameworkConfig& config);

}  // namespace trigger_descent
