// First-order comparison solvers instrumented with the same oracle counters
// and result schema as the trigger framework.
#pragma once

#include "trigger_descent/framework.hpp"

namespace trigger_descent {

struct LineSearchConfig {
  double c1 = 1e-4;              // sufficient decrease
  double c2 = 0.9;               // curvature (Wolfe only)
  double backtrack_factor = 0.5;
  double alpha_init = 1.0;
  int max_ls_iters = 100;

  void validate() const;  // throws std::invalid_argument
};

// Gradient descent with Armijo backtracking on the steepest-descent
// direction. One gradient evaluation per outer iteration plus the initial
// one (exactly); one objective evaluation per backtracking trial.
RunResult gd_armijo(const Problem& problem, const Vector& theta0,
                    const LineSearchConfig& config, double eps,
                    long long max_outer);

// Gradient descent with a strong-Wolfe bracket/zoom line search. Counters
// track every objective and gradient call made inside the search.
RunResult gd_wolfe(const Problem& problem, const Vector& theta0,
                   const LineSearchConfig& config, double eps,
                   long long max_outer);

}  // namespace trigger_descent
