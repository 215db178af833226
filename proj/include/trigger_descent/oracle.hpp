// Objective-problem abstraction with exact oracle-call accounting, a
// single-entry gradient cache, and a finite-difference derivative checker.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "trigger_descent/linalg.hpp"

namespace trigger_descent {

// Counts top-level oracle calls for one run. objective_evals counts calls to
// Problem::objective; quadrature-based objectives additionally record their
// internal estimating-function calls in inner_oracle_evals (never in
// gradient_evals).
struct EvalCounters {
  long long objective_evals = 0;
  long long gradient_evals = 0;
  long long inner_oracle_evals = 0;

  long long total_evals() const { return objective_evals + gradient_evals; }
};

// Raised when an oracle returns a non-finite value; carries the offending
// point. Solvers convert it into a Failed run status instead of crashing a
// whole experiment batch.
class OracleFailure : public std::runtime_error {
 public:
  OracleFailure(Vector at, const std::string& what)
      : std::runtime_error(what), at_(std::move(at)) {}
  const Vector& at() const { return at_; }

 private:
  Vector at_;
};

// The objective may consume counters to accrue inner_oracle_evals (path
// integral objectives); analytic objectives ignore them.
using ObjectiveFn = std::function<double(const Vector&, EvalCounters&)>;
using GradientFn = std::function<Vector(const Vector&)>;

struct Problem {
  std::string name;
  int dimension = 0;
  ObjectiveFn objective;
  GradientFn gradient;
  Vector standard_start;
  std::optional<Vector> known_minimizer;
  std::optional<double> lower_bound;
  // Box from which the derivative checker samples points (per-coordinate).
  double fd_box_lo = -2.0;
  double fd_box_hi = 2.0;
};

// Single-entry gradient cache. A hit requires bit-identical coordinates so
// counter semantics never depend on floating-point tolerance choices.
struct CachedGradient {
  Vector point;
  Vector value;
  double norm = 0.0;
  bool valid = false;

  bool matches(const Vector& theta) const {
    return valid && bitwise_equal(point, theta);
  }
};

// Calls the objective exactly once, increments objective_evals by exactly
// one, enforces finiteness and the declared lower bound.
double eval_objective(const Problem& p, const Vector& theta, EvalCounters& c);

// Returns the gradient at theta through the cache: a cache hit performs no
// oracle call and no counter increment; a miss calls the oracle once,
// increments gradient_evals, and refreshes the cache in place.
const CachedGradient& eval_gradient(const Problem& p, const Vector& theta,
                                    EvalCounters& c, CachedGradient& cache);

// Central differences with step h per coordinate; uses a scratch counter so
// run accounting is untouched. 2n objective calls.
Vector finite_difference_gradient(const Problem& p, const Vector& theta,
                                  double h);

// Conventional step size for the audit below.
inline double fd_step(const Vector& theta) {
  return 1e-6 * std::max(1.0, norm2(theta));
}

// Derivative audit: at `points` seeded uniform points inside the problem's
// fd box, compares finite differences against the analytic gradient.
// Error metric is norm-wise and floored at unit gradient scale:
//   err = ||fd - grad|| / max(1, ||grad||).
struct FdAudit {
  double max_rel_err = 0.0;
  std::vector<double> per_point;
  bool pass(double tol) const { return max_rel_err <= tol; }
};
FdAudit fd_audit(const Problem& p, int points, std::uint64_t seed);

}  // namespace trigger_descent
