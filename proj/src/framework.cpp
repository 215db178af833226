#include "trigger_descent/framework.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace trigger_descent {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ConvergedGradient: return "ConvergedGradient";
    case RunStatus::StationaryExact: return "StationaryExact";
    case RunStatus::MaxOuterIterations: return "MaxOuterIterations";
    case RunStatus::Failed: return "Failed";
  }
  return "?";
}

void FrameworkConfig::validate() const {
  if (!(sigma_low > 0.0 && sigma_low < 1.0))
    throw std::invalid_argument("sigma_low must lie in (0,1)");
  if (!(sigma_upp >= 1.0))
    throw std::invalid_argument("sigma_upp must be >= 1");
  if (delta_cap && !(*delta_cap > 0.0))
    throw std::invalid_argument("delta_cap must be positive");
  if (w < 1) throw std::invalid_argument("w must be >= 1");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("rho must lie in (0,1)");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (max_outer < 1) throw std::invalid_argument("max_outer must be >= 1");
  if (!(delta0 > 0.0)) throw std::invalid_argument("delta0 must be positive");
}

ObjectiveWindow update_window(const ObjectiveWindow& window,
                              double accepted_value, int w) {
  ObjectiveWindow next = window;
  next.values.push_back(accepted_value);
  while (static_cast<int>(next.values.size()) > w)
    next.values.erase(next.values.begin());
  next.tau_obj = *std::max_element(next.values.begin(), next.values.end());
  return next;
}

TriggerReason check_trigger(const Vector& psi, const Vector& theta,
                            double grad_norm_psi, long long j,
                            const TriggerThresholds& th) {
  if (dist2(psi, theta) > th.iter_exit) return TriggerReason::Distance;
  if (grad_norm_psi <= th.gra_low) return TriggerReason::GradientLow;
  if (grad_norm_psi >= th.gra_upp) return TriggerReason::GradientHigh;
  if (j == th.iter_max) return TriggerReason::MaxInner;
  return TriggerReason::None;
}

bool armijo_reject(double F_psi, const ObjectiveWindow& window, double rho,
                   double delta_k, double alpha0, double dir_deriv0) {
  return F_psi >= window.tau_obj + rho * delta_k * alpha0 * dir_deriv0;
}

void apply_outcome(OuterState& state, TriggerReason branch_reason,
                   bool rejected, const Candidate& cand,
                   const FrameworkConfig& config, ThresholdPolicy& th_policy,
                   bool select_thresholds) {
  if (rejected) {
    state.delta *= config.sigma_low;
    if (select_thresholds) {
      state.thresholds =
          th_policy.select(state.theta, state.grad_theta.norm,
                           state.thresholds, AcceptOutcome::Rejected);
    }
    return;
  }
  AcceptOutcome outcome = AcceptOutcome::AcceptedNormal;
  if (branch_reason == TriggerReason::GradientLow)
    outcome = AcceptOutcome::AcceptedLow;
  else if (branch_reason == TriggerReason::GradientHigh)
    outcome = AcceptOutcome::AcceptedHigh;

  state.theta = cand.point;
  state.grad_theta.point = cand.point;
  state.grad_theta.value = cand.grad;
  state.grad_theta.norm = cand.grad_norm;
  state.grad_theta.valid = true;
  state.window = update_window(state.window, cand.objective, config.w);
  if (outcome != AcceptOutcome::AcceptedLow) {
    double d = state.delta * config.sigma_upp;
    if (config.delta_cap) d = std::min(d, *config.delta_cap);
    state.delta = d;
  }
  if (select_thresholds) {
    state.thresholds = th_policy.select(state.theta, state.grad_theta.norm,
                                        state.thresholds, outcome);
  }
}

namespace {

class PolicyFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace

RunResult run(const Problem& problem, const Vector& theta0, StepPolicy& policy,
              ThresholdPolicy& th_policy, const FrameworkConfig& config) {
  config.validate();
  if (static_cast<int>(theta0.size()) != problem.dimension)
    throw std::invalid_argument("start point dimension mismatch for " +
                                problem.name);

  const auto t_start = std::chrono::steady_clock::now();
  RunResult res;
  EvalCounters& C = res.counters;
  OuterState st;
  st.theta = theta0;
  st.delta = config.delta0;

  try {
    const double F0 = eval_objective(problem, theta0, C);
    st.window.init(F0);
    res.trace.F_theta0 = F0;
    eval_gradient(problem, theta0, C, st.grad_theta);
    policy.begin_run(theta0);
    if (st.grad_theta.norm > config.eps)
      st.thresholds = th_policy.initial(theta0, st.grad_theta.norm);

    while (st.grad_theta.norm > config.eps && st.k < config.max_outer) {
      policy.begin_inner(st.k, st.theta, st.grad_theta.value,
                         st.grad_theta.norm);
      Vector psi = st.theta;
      CachedGradient inner = st.grad_theta;  // gradient at psi_0 is the anchor's
      long long j = 0;
      TriggerReason reason = TriggerReason::None;
      while (true) {
        const StepContext ctx{st.k, j, st.theta, st.delta, st.thresholds};
        const Vector gamma = policy.direction(psi, inner.value, ctx);
        const double alpha = policy.size(psi, inner.value, inner.norm, ctx);
        if (!std::isfinite(alpha) || !(alpha > 0.0) || !all_finite(gamma))
          throw PolicyFailure("step policy produced non-finite or non-positive step");
        if (j == 0) {
          st.first_inner_step = alpha;
          st.first_inner_dir_derivative = dot(st.grad_theta.value, gamma);
        }
        const double c = st.delta * alpha;
        for (std::size_t i = 0; i < psi.size(); ++i) psi[i] += c * gamma[i];
        ++j;
        eval_gradient(problem, psi, C, inner);
        reason = check_trigger(psi, st.theta, inner.norm, j, st.thresholds);
        if (reason != TriggerReason::None) break;
      }

      const double F_psi = eval_objective(problem, psi, C);
      const bool rejected =
          armijo_reject(F_psi, st.window, config.rho, st.delta,
                        st.first_inner_step, st.first_inner_dir_derivative);
      // The acceptance branch re-tests the gradient band at the triggering
      // point; a distance- or cap-trigger whose gradient nonetheless left
      // the band is handled by the band branch.
      TriggerReason branch = reason;
      if (!rejected) {
        if (inner.norm <= st.thresholds.gra_low)
          branch = TriggerReason::GradientLow;
        else if (inner.norm >= st.thresholds.gra_upp)
          branch = TriggerReason::GradientHigh;
      }
      const double tau_before = st.window.tau_obj;
      const bool terminal_accept = !rejected && inner.norm <= config.eps;
      apply_outcome(st, branch, rejected,
                    Candidate{psi, F_psi, inner.value, inner.norm}, config,
                    th_policy, /*select_thresholds=*/!terminal_accept);
      policy.on_outcome(rejected ? AcceptOutcome::Rejected
                        : branch == TriggerReason::GradientLow
                            ? AcceptOutcome::AcceptedLow
                        : branch == TriggerReason::GradientHigh
                            ? AcceptOutcome::AcceptedHigh
                            : AcceptOutcome::AcceptedNormal);
      res.trace.records.push_back(OuterRecord{
          st.k, !rejected, reason, j, st.theta, F_psi, st.grad_theta.norm,
          st.delta, tau_before});
      ++st.k;
    }

    res.status = st.grad_theta.norm == 0.0 ? RunStatus::StationaryExact
                 : st.grad_theta.norm <= config.eps
                     ? RunStatus::ConvergedGradient
                     : RunStatus::MaxOuterIterations;
  } catch (const OracleFailure& e) {
    res.status = RunStatus::Failed;
    res.failure_reason = std::string("OracleFailure: ") + e.what();
  } catch (const PolicyFailure& e) {
    res.status = RunStatus::Failed;
    res.failure_reason = std::string("PolicyFailure: ") + e.what();
  }

  res.outer_iterations = st.k;
  res.terminal_point = st.theta;
  res.terminal_grad_norm = st.grad_theta.valid
                               ? st.grad_theta.norm
                               : std::numeric_limits<double>::infinity();
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return res;
}

}  // namespace trigger_descent
