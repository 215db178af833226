#include "trigger_descent/oracle.hpp"

#include <cmath>

#include "trigger_descent/rng.hpp"
#include "trigger_descent/util.hpp"

namespace trigger_descent {

double eval_objective(const Problem& p, const Vector& theta, EvalCounters& c) {
  ++c.objective_evals;
  const double f = p.objective(theta, c);
  if (!std::isfinite(f)) {
    throw OracleFailure(theta, "objective returned non-finite value at " +
                                   p.name + " point");
  }
  if (p.lower_bound && f < *p.lower_bound) {
    throw OracleFailure(theta, "objective " + format_double(f) +
                                   " below declared lower bound " +
                                   format_double(*p.lower_bound) + " for " +
                                   p.name);
  }
  return f;
}

const CachedGradient& eval_gradient(const Problem& p, const Vector& theta,
                                    EvalCounters& c, CachedGradient& cache) {
  if (cache.matches(theta)) return cache;
  ++c.gradient_evals;
  Vector g = p.gradient(theta);
  if (!all_finite(g)) {
    throw OracleFailure(theta,
                        "gradient returned non-finite component at " + p.name);
  }
  cache.point = theta;
  cache.norm = norm2(g);
  cache.value = std::move(g);
  cache.valid = true;
  return cache;
}

Vector finite_difference_gradient(const Problem& p, const Vector& theta,
                                  double h) {
  EvalCounters scratch;
  Vector g(theta.size());
  Vector x = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double xi = theta[i];
    x[i] = xi + h;
    const double fp = eval_objective(p, x, scratch);
    x[i] = xi - h;
    const double fm = eval_objective(p, x, scratch);
    x[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

FdAudit fd_audit(const Problem& p, int points, std::uint64_t seed) {
  FdAudit audit;
  Rng rng(seed);
  for (int t = 0; t < points; ++t) {
    Vector theta(p.dimension);
    for (auto& v : theta) v = rng.uniform(p.fd_box_lo, p.fd_box_hi);
    const Vector fd = finite_difference_gradient(p, theta, fd_step(theta));
    const Vector grad = p.gradient(theta);
    const double err =
        dist2(fd, grad) / std::max(1.0, norm2(grad));
    audit.per_point.push_back(err);
    audit.max_rel_err = std::max(audit.max_rel_err, err);
  }
  return audit;
}

}  // namespace trigger_descent
