#include "trigger_descent/baselines.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace trigger_descent {

void LineSearchConfig::validate() const {
  if (!(c1 > 0.0 && c1 < 1.0))
    throw std::invalid_argument("c1 must lie in (0,1)");
  if (!(c2 > c1 && c2 < 1.0))
    throw std::invalid_argument("c2 must lie in (c1,1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
    throw std::invalid_argument("backtrack_factor must lie in (0,1)");
  if (!(alpha_init > 0.0))
    throw std::invalid_argument("alpha_init must be positive");
  if (max_ls_iters < 1)
    throw std::invalid_argument("max_ls_iters must be >= 1");
}

namespace {

class LineSearchFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Loop {
  std::chrono::steady_clock::time_point t_start =
      std::chrono::steady_clock::now();

  void finish(RunResult& res, const OuterState& st, double eps) const {
    res.outer_iterations = st.k;
    res.terminal_point = st.theta;
    res.terminal_grad_norm = st.grad_theta.valid
                                 ? st.grad_theta.norm
                                 : std::numeric_limits<double>::infinity();
    if (res.failure_reason.empty()) {
      res.status = st.grad_theta.norm == 0.0 ? RunStatus::StationaryExact
                   : st.grad_theta.norm <= eps ? RunStatus::ConvergedGradient
                                               : RunStatus::MaxOuterIterations;
    }
    res.wall_time_s = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_start)
                          .count();
  }
};

void record_step(RunTrace& trace, const OuterState& st, long long ls_evals,
                 double F_new, double tau_before, double alpha) {
  trace.records.push_back(OuterRecord{st.k, true, TriggerReason::None,
                                      ls_evals, st.theta, F_new,
                                      st.grad_theta.norm, alpha, tau_before});
}

}  // namespace

RunResult gd_armijo(const Problem& problem, const Vector& theta0,
                    const LineSearchConfig& config, double eps,
                    long long max_outer) {
  config.validate();
  if (static_cast<int>(theta0.size()) != problem.dimension)
    throw std::invalid_argument("start point dimension mismatch for " +
                                problem.name);
  Loop loop;
  RunResult res;
  EvalCounters& C = res.counters;
  OuterState st;
  st.theta = theta0;
  try {
    double F = eval_objective(problem, theta0, C);
    res.trace.F_theta0 = F;
    eval_gradient(problem, theta0, C, st.grad_theta);
    while (st.grad_theta.norm > eps && st.k < max_outer) {
      const double g2 = st.grad_theta.norm * st.grad_theta.norm;
      double alpha = config.alpha_init;
      bool accepted = false;
      Vector psi;
      double F_psi = 0.0;
      long long trials = 0;
      for (int i = 0; i < config.max_ls_iters; ++i) {
        psi = axpy(st.theta, -alpha, st.grad_theta.value);
        F_psi = eval_objective(problem, psi, C);
        ++trials;
        // Compare decreases, not absolute objectives: when c1*alpha*g2
        // drops below one ulp of F, the textbook form F_psi <= F - term
        // degenerates to F_psi <= F and accepts bitwise-zero steps.
        if (F_psi - F <= -config.c1 * alpha * g2) {
          accepted = true;
          break;
        }
        alpha *= config.backtrack_factor;
      }
      if (!accepted)
        throw LineSearchFailure("backtracking exhausted " +
                                std::to_string(config.max_ls_iters) +
                                " trials");
      const double tau_before = F;
      st.theta = psi;
      F = F_psi;
      eval_gradient(problem, st.theta, C, st.grad_theta);
      record_step(res.trace, st, trials, F, tau_before, alpha);
      ++st.k;
    }
  } catch (const OracleFailure& e) {
    res.status = RunStatus::Failed;
    res.failure_reason = std::string("OracleFailure: ") + e.what();
  } catch (const LineSearchFailure& e) {
    res.status = RunStatus::Failed;
    res.failure_reason = std::string("LineSearchFailure: ") + e.what();
  }
  loop.finish(res, st, eps);
  return res;
}

namespace {

// Strong-Wolfe line search along direction d from theta, given
// phi(0) = F and phi'(0) = g.d (negative). Returns the accepted step and
// fills the objective / gradient at the accepted point (the gradient was
// evaluated there during the search, so the caller reuses it).
struct WolfePoint {
  double alpha = 0.0;
  double F = 0.0;
  Vector grad;
  double grad_norm = 0.0;
};

class WolfeSearch {
 public:
  WolfeSearch(const Problem& problem, EvalCounters& C,
              const LineSearchConfig& cfg, const Vector& theta,
              const Vector& d, double phi0, double dphi0)
      : problem_(problem), C_(C), cfg_(cfg), theta_(theta), d_(d),
        phi0_(phi0), dphi0_(dphi0) {}

  WolfePoint search() {
    double alpha_prev = 0.0;
    double phi_prev = phi0_;
    double alpha = cfg_.alpha_init;
    for (int i = 0; i < cfg_.max_ls_iters; ++i) {
      const double phi = eval_at(alpha);
      if (phi - phi0_ > cfg_.c1 * alpha * dphi0_ ||
          (i > 0 && phi >= phi_prev)) {
        return zoom(alpha_prev, phi_prev, alpha);
      }
      const double dphi = slope_at(alpha);
      if (std::fabs(dphi) <= -cfg_.c2 * dphi0_) return make_point(alpha, phi);
      if (dphi >= 0.0) return zoom(alpha, phi, alpha_prev);
      alpha_prev = alpha;
      phi_prev = phi;
      alpha *= 2.0;
    }
    throw LineSearchFailure("strong-Wolfe bracketing exhausted " +
                            std::to_string(cfg_.max_ls_iters) + " trials");
  }

 private:
  double eval_at(double alpha) {
    trial_point_ = axpy(theta_, alpha, d_);
    return eval_objective(problem_, trial_point_, C_);
  }

  // Gradient at the most recent trial point; cached for reuse on acceptance.
  double slope_at(double /*alpha*/) {
    eval_gradient(problem_, trial_point_, C_, grad_cache_);
    return dot(grad_cache_.value, d_);
  }

  WolfePoint make_point(double alpha, double phi) {
    WolfePoint p;
    p.alpha = alpha;
    p.F = phi;
    p.grad = grad_cache_.value;
    p.grad_norm = grad_cache_.norm;
    return p;
  }

  // Bisection zoom: lo always satisfies sufficient decrease with the lowest
  // objective seen; hi is the other bracket end.
  WolfePoint zoom(double lo, double phi_lo, double hi) {
    for (int i = 0; i < cfg_.max_ls_iters; ++i) {
      const double alpha = 0.5 * (lo + hi);
      const double phi = eval_at(alpha);
      if (phi - phi0_ > cfg_.c1 * alpha * dphi0_ || phi >= phi_lo) {
        hi = alpha;
        continue;
      }
      const double dphi = slope_at(alpha);
      if (std::fabs(dphi) <= -cfg_.c2 * dphi0_) return make_point(alpha, phi);
      if (dphi * (hi - lo) >= 0.0) hi = lo;
      lo = alpha;
      phi_lo = phi;
    }
    throw LineSearchFailure("strong-Wolfe zoom exhausted " +
                            std::to_string(cfg_.max_ls_iters) + " trials");
  }

  const Problem& problem_;
  EvalCounters& C_;
  const LineSearchConfig& cfg_;
  const Vector& theta_;
  const Vector& d_;
  double phi0_;
  double dphi0_;
  Vector trial_point_;
  CachedGradient grad_cache_;
};

}  // namespace

RunResult gd_wolfe(const Problem& problem, const Vector& theta0,
                   const LineSearchConfig& config, double eps,
                   long long max_outer) {
  config.validate();
  if (static_cast<int>(theta0.size()) != problem.dimension)
    throw std::invalid_argument("start point dimension mismatch for " +
                                problem.name);
  Loop loop;
  RunResult res;
  EvalCounters& C = res.counters;
  OuterState st;
  st.theta = theta0;
  try {
    double F = eval_objective(problem, theta0, C);
    res.trace.F_theta0 = F;
    eval_gradient(problem, theta0, C, st.grad_theta);
    while (st.grad_theta.norm > eps && st.k < max_outer) {
      const Vector d = scale(-1.0, st.grad_theta.value);
      const double dphi0 = -st.grad_theta.norm * st.grad_theta.norm;
      WolfeSearch ls(problem, C, config, st.theta, d, F, dphi0);
      const long long evals_before = C.objective_evals;
      const WolfePoint p = ls.search();
      const double tau_before = F;
      st.theta = axpy(st.theta, p.alpha, d);
      F = p.F;
      st.grad_theta.point = st.theta;
      st.grad_theta.value = p.grad;
      st.grad_theta.norm = p.grad_norm;
      st.grad_theta.valid = true;
      record_step(res.trace, st, C.objective_evals - evals_before, F,
                  tau_before, p.alpha);
      ++st.k;
    }
  } catch (const OracleFailure& e) {
    res.status = RunStatus::Failed;
    res.failure_reason = std::string("OracleFailure: ") + e.what();
  } catch (const LineSearchFailure& e) {
    res.status = RunStatus::Failed;
    res.failure_reason = std::string("LineSearchFailure: ") + e.what();
  }
  loop.finish(res, st, eps);
  return res;
}

}  // namespace trigger_descent
