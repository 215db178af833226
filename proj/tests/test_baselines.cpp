#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "trigger_descent/baselines.hpp"
#include "trigger_descent/lipschitz_step.hpp"
#include "trigger_descent/problems.hpp"

using namespace trigger_descent;
using testing::make_quadratic;

namespace {

Problem suite_problem(const std::string& name) {
  for (const auto& p : builtin_suite()) {
    if (p.name == name) return p;
  }
  throw std::logic_error("missing suite problem " + name);
}

const LineSearchConfig kLs{};

}  // namespace

TEST_CASE("LineSearchConfig::validate rejects bad parameters") {
  LineSearchConfig c;
  CHECK_NOTHROW(c.validate());
  c.c1 = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = LineSearchConfig{};
  c.c2 = c.c1;  // curvature constant must exceed c1
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = LineSearchConfig{};
  c.backtrack_factor = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = LineSearchConfig{};
  c.alpha_init = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = LineSearchConfig{};
  c.max_ls_iters = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("gd_armijo solves the unit quadratic in one accepted trial") {
  // From theta0=1 with alpha_init=1 the first trial lands exactly at 0.
  Problem q = make_quadratic(1);
  RunResult r = gd_armijo(q, {1.0}, kLs, 1e-5, 100);
  CHECK_EQ(r.status, RunStatus::StationaryExact);
  CHECK_EQ(r.outer_iterations, 1);
  CHECK_EQ(r.terminal_point, Vector{0.0});
  CHECK_EQ(r.counters.objective_evals, 2);  // initial + one trial
  CHECK_EQ(r.counters.gradient_evals, 2);   // theta0 and the new iterate
  REQUIRE_EQ(r.trace.records.size(), 1);
  CHECK(r.trace.records[0].accepted);
  CHECK_EQ(r.trace.records[0].j_trigger, 1);  // backtracking trials used
  CHECK_EQ(r.trace.records[0].delta_after, 1.0);  // accepted alpha
}

TEST_CASE("gd_wolfe solves the unit quadratic in one accepted trial") {
  // phi(1) = 0 satisfies sufficient decrease and |phi'(1)| = 0 <= c2.
  Problem q = make_quadratic(1);
  RunResult r = gd_wolfe(q, {1.0}, kLs, 1e-5, 100);
  CHECK_EQ(r.status, RunStatus::StationaryExact);
  CHECK_EQ(r.outer_iterations, 1);
  CHECK_EQ(r.terminal_point, Vector{0.0});
  CHECK_EQ(r.counters.objective_evals, 2);
  CHECK_EQ(r.counters.gradient_evals, 2);
}

TEST_CASE("baselines return immediately from converged starts") {
  Problem q = make_quadratic(2);
  for (auto* solver : {&gd_armijo, &gd_wolfe}) {
    RunResult r = (*solver)(q, {0.0, 0.0}, kLs, 1e-5, 100);
    CHECK_EQ(r.status, RunStatus::StationaryExact);
    CHECK_EQ(r.outer_iterations, 0);
    CHECK_EQ(r.counters.objective_evals, 1);
    CHECK_EQ(r.counters.gradient_evals, 1);

    RunResult s = (*solver)(q, {5e-6, 0.0}, kLs, 1e-5, 100);
    CHECK_EQ(s.status, RunStatus::ConvergedGradient);
    CHECK_EQ(s.outer_iterations, 0);
  }
}

TEST_CASE("gd_armijo on Rosenbrock: converges, with the documented counters") {
  const Problem& p = suite_problem("rosenbrock_2");
  RunResult r = gd_armijo(p, p.standard_start, kLs, 1e-5, 100000);
  REQUIRE_EQ(r.status, RunStatus::ConvergedGradient);
  CHECK(std::abs(r.terminal_point[0] - 1.0) < 1e-3);
  CHECK(std::abs(r.terminal_point[1] - 1.0) < 1e-3);

  // Exactly one gradient per outer iteration plus the initial evaluation;
  // at least one objective evaluation (trial) per outer iteration.
  CHECK_EQ(r.counters.gradient_evals, r.outer_iterations + 1);
  CHECK(r.counters.objective_evals >= r.outer_iterations);

  // The novel method needs far fewer objective evaluations on this problem.
  RunResult n = solve_novel(p, p.standard_start);
  REQUIRE(is_successful(n.status));
  CHECK(n.counters.objective_evals * 2 < r.counters.objective_evals);
}

TEST_CASE("accepted Armijo steps satisfy sufficient decrease post-hoc") {
  const Problem& p = suite_problem("rosenbrock_2");
  LineSearchConfig cfg;
  RunResult r = gd_armijo(p, p.standard_start, cfg, 1e-4, 50000);
  REQUIRE(is_successful(r.status));
  REQUIRE(r.trace.records.size() >= 2);
  for (std::size_t i = 1; i < r.trace.records.size(); ++i) {
    const OuterRecord& prev = r.trace.records[i - 1];
    const OuterRecord& cur = r.trace.records[i];
    const double g2 = prev.grad_norm_after * prev.grad_norm_after;
    // Difference form: the same rearrangement the implementation tests,
    // immune to the decrease term vanishing under one ulp of |F|. The
    // (1 - 1e-12) slack absorbs the norm->square rounding of g2.
    CHECK(cur.F_trigger - prev.F_trigger <=
          -cfg.c1 * cur.delta_after * g2 * (1.0 - 1e-12));
    CHECK_EQ(cur.tau_obj_before, prev.F_trigger);
  }
}

TEST_CASE("accepted Wolfe steps satisfy both strong conditions post-hoc") {
  const Problem& p = suite_problem("rosenbrock_2");
  LineSearchConfig cfg;
  RunResult r = gd_wolfe(p, p.standard_start, cfg, 1e-4, 50000);
  REQUIRE(is_successful(r.status));
  EvalCounters scratch;
  Vector theta = p.standard_start;
  for (const OuterRecord& rec : r.trace.records) {
    Vector g0 = p.gradient(theta);
    const double dphi0 = -dot(g0, g0);
    const double alpha = rec.delta_after;
    const double phi0 = eval_objective(p, theta, scratch);
    const double phi = eval_objective(p, rec.theta_after, scratch);
    CHECK(phi - phi0 <= cfg.c1 * alpha * dphi0 * (1.0 - 1e-9));
    Vector g1 = p.gradient(rec.theta_after);
    const double dphi = -dot(g1, g0);
    CHECK(std::abs(dphi) <= cfg.c2 * std::abs(dphi0) * (1.0 + 1e-12));
    theta = rec.theta_after;
  }
}

TEST_CASE("line-search exhaustion fails cleanly on an ascent oracle") {
  // A gradient oracle with the wrong sign makes every trial increase F.
  Problem lying = make_quadratic(1);
  lying.gradient = [](const Vector& x) { return Vector{-x[0]}; };
  for (auto* solver : {&gd_armijo, &gd_wolfe}) {
    RunResult r = (*solver)(lying, {1.0}, kLs, 1e-5, 100);
    CHECK_EQ(r.status, RunStatus::Failed);
    CHECK(!r.failure_reason.empty());
    CHECK(r.failure_reason.find("LineSearchFailure") != std::string::npos);
  }
}

TEST_CASE("baseline runs are deterministic") {
  const Problem& p = suite_problem("beale");
  RunResult a = gd_wolfe(p, p.standard_start, kLs, 1e-5, 20000);
  RunResult b = gd_wolfe(p, p.standard_start, kLs, 1e-5, 20000);
  CHECK_EQ(a.status, b.status);
  CHECK_EQ(a.counters.objective_evals, b.counters.objective_evals);
  CHECK_EQ(a.counters.gradient_evals, b.counters.gradient_evals);
  CHECK_EQ(a.terminal_point, b.terminal_point);
}
