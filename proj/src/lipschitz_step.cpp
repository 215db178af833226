#include "trigger_descent/lipschitz_step.hpp"

#include <cassert>
#include <cmath>

namespace trigger_descent {

double novel_step_size(double grad_norm, double tau_gra_low, double L_hat) {
  const double g = grad_norm;
  const double band = tau_gra_low * tau_gra_low /
                      (g * g * g + 0.5 * g * g * L_hat + NovelConfig::floor_eps);
  const double curv = 1.0 / (g + 0.5 * L_hat + NovelConfig::floor_eps);
  return std::min(band, curv) + NovelConfig::floor_eps;
}

double update_lipschitz(const LipschitzEstimate& state, long long j,
                        long long k, const Vector& psi_j,
                        const Vector& psi_prev, const Vector& grad_j,
                        const Vector& grad_prev) {
  if (j == 0) return k == 0 ? 1.0 : state.L_hat;
  if (bitwise_equal(psi_j, psi_prev)) return state.L_hat;
  const double ratio = dist2(grad_j, grad_prev) / dist2(psi_j, psi_prev);
  return state.last_outer_accepted ? ratio : std::max(ratio, state.L_hat);
}

std::pair<double, double> novel_gradient_thresholds(double grad_norm) {
  assert(grad_norm > 0.0 && "thresholds require a nonzero gradient");
  const double low = NovelConfig::grad_low_factor * grad_norm;
  return {low, NovelConfig::grad_upp_factor * low};
}

void NovelStepPolicy::begin_inner(long long k, const Vector& theta,
                                  const Vector& grad_theta,
                                  double /*grad_norm*/) {
  (void)k;
  lip_.prev_point = theta;
  lip_.prev_grad = grad_theta;
}

Vector NovelStepPolicy::direction(const Vector& /*psi*/, const Vector& grad,
                                  const StepContext& /*ctx*/) {
  return scale(-1.0, grad);
}

double NovelStepPolicy::size(const Vector& psi, const Vector& grad,
                             double grad_norm, const StepContext& ctx) {
  lip_.L_hat = update_lipschitz(lip_, ctx.j, ctx.k, psi, lip_.prev_point, grad,
                                lip_.prev_grad);
  lip_.prev_point = psi;
  lip_.prev_grad = grad;
  return novel_step_size(grad_norm, ctx.thresholds.gra_low, lip_.L_hat);
}

void NovelStepPolicy::on_outcome(AcceptOutcome outcome) {
  lip_.last_outer_accepted = outcome != AcceptOutcome::Rejected;
}

TriggerThresholds NovelThresholdPolicy::initial(const Vector& /*theta0*/,
                                                double grad_norm) {
  const auto [low, upp] = novel_gradient_thresholds(grad_norm);
  return TriggerThresholds{NovelConfig::iter_exit, NovelConfig::iter_max, low,
                           upp};
}

TriggerThresholds NovelThresholdPolicy::select(
    const Vector& /*theta_new*/, double grad_norm_new,
    const TriggerThresholds& previous, AcceptOutcome outcome) {
  if (outcome == AcceptOutcome::AcceptedLow ||
      outcome == AcceptOutcome::AcceptedHigh) {
    const auto [low, upp] = novel_gradient_thresholds(grad_norm_new);
    return TriggerThresholds{NovelConfig::iter_exit, NovelConfig::iter_max,
                             low, upp};
  }
  return previous;
}

NovelSolver make_novel_solver() {
  NovelSolver s;
  s.step = std::make_unique<NovelStepPolicy>();
  s.thresholds = std::make_unique<NovelThresholdPolicy>();
  s.config.sigma_low = NovelConfig::sigma_low;
  s.config.sigma_upp = NovelConfig::sigma_upp;
  s.config.delta_cap = NovelConfig::delta_cap;
  s.config.w = NovelConfig::w;
  s.config.rho = NovelConfig::rho;
  s.config.eps = 1e-5;
  s.config.max_outer = 20000;
  s.config.delta0 = 1.0;
  return s;
}

RunResult solve_novel(const Problem& problem, const Vector& theta0, double eps,
                      long long max_outer, std::optional<int> w_override) {
  NovelSolver s = make_novel_solver();
  s.config.eps = eps;
  s.config.max_outer = max_outer;
  if (w_override) s.config.w = *w_override;
  return run(problem, theta0, *s.step, *s.thresholds, s.config);
}

}  // namespace trigger_descent
