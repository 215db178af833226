// The adaptive step-size instance of the trigger framework: negative-gradient
// directions whose length is derived from a running secant estimate of the
// local gradient Lipschitz constant, together with the gradient-band
// threshold rule that pairs with it.
#pragma once

#include <memory>
#include <numbers>
#include <optional>

#include "trigger_descent/framework.hpp"

namespace trigger_descent {

// Running local-Lipschitz approximation. `last_outer_accepted` tracks whether
// the current anchor was freshly accepted (true also before the first outer
// iteration); it selects between the aggressive (replace) and conservative
// (running max) secant updates.
struct LipschitzEstimate {
  double L_hat = 1.0;
  Vector prev_point;
  Vector prev_grad;
  bool last_outer_accepted = true;
};

// Fixed constants of the instance, centralized so they are never duplicated
// inline.
struct NovelConfig {
  static constexpr int w = 10;
  static constexpr double rho = 1e-4;
  static constexpr double sigma_low = 0.5;
  static constexpr double sigma_upp = 1.5;
  static constexpr double delta_cap = 1.0;
  static constexpr double iter_exit = 10.0;
  static constexpr long long iter_max = 100;
  static constexpr double floor_eps = 1e-16;  // denominator and additive floor
  static constexpr double grad_low_factor = std::numbers::sqrt2 / 2.0;  // 1/sqrt(2)
  static inline const double grad_upp_factor = std::sqrt(20.0);
};

// alpha = min( tau_gra_low^2 / (g^3 + 0.5 g^2 L + 1e-16),
//              1 / (g + 0.5 L + 1e-16) ) + 1e-16,   g = ||grad at psi||.
// The floors bound alpha inside [1e-16, 1e16 + 1e-16] for any nonnegative
// finite inputs.
double novel_step_size(double grad_norm, double tau_gra_low, double L_hat);

// Secant update for the local Lipschitz approximation:
//   j=0, k=0           -> 1 (initial value);
//   j=0, k>0           -> carry the estimate from the previous inner loop;
//   j>0, fresh anchor  -> ||grad_j - grad_prev|| / ||psi_j - psi_prev||;
//   j>0, after reject  -> max(that ratio, previous estimate).
// A bitwise-zero displacement carries no curvature information and retains
// the previous estimate.
double update_lipschitz(const LipschitzEstimate& state, long long j,
                        long long k, const Vector& psi_j,
                        const Vector& psi_prev, const Vector& grad_j,
                        const Vector& grad_prev);

// (grad_norm / sqrt(2), sqrt(20) * grad_norm / sqrt(2)); requires a positive
// norm, which the solver guarantees by terminating at zero gradients first.
std::pair<double, double> novel_gradient_thresholds(double grad_norm);

class NovelStepPolicy final : public StepPolicy {
 public:
  void begin_inner(long long k, const Vector& theta, const Vector& grad_theta,
                   double grad_norm) override;
  Vector direction(const Vector& psi, const Vector& grad,
                   const StepContext& ctx) override;
  double size(const Vector& psi, const Vector& grad, double grad_norm,
              const StepContext& ctx) override;
  void on_outcome(AcceptOutcome outcome) override;

  const LipschitzEstimate& estimate() const { return lip_; }

 private:
  LipschitzEstimate lip_;
};

// Gradient band resets when an acceptance was driven by the band itself;
// otherwise (normal acceptance or rejection) the previous interval carries.
class NovelThresholdPolicy final : public ThresholdPolicy {
 public:
  TriggerThresholds initial(const Vector& theta0, double grad_norm) override;
  TriggerThresholds select(const Vector& theta_new, double grad_norm_new,
                           const TriggerThresholds& previous,
                           AcceptOutcome outcome) override;
};

struct NovelSolver {
  std::unique_ptr<StepPolicy> step;
  std::unique_ptr<ThresholdPolicy> thresholds;
  FrameworkConfig config;
};

// Fresh policy instances plus the instance constants embedded in a
// FrameworkConfig. One solver serves exactly one run.
NovelSolver make_novel_solver();

// Convenience wrapper: build a fresh solver, apply overrides, run.
RunResult solve_novel(const Problem& problem, const Vector& theta0,
                      double eps = 1e-5, long long max_outer = 20000,
                      std::optional<int> w_override = std::nullopt);

}  // namespace trigger_descent
