#include <doctest.h>

#include <sstream>

#include "worked_example_fixture.hpp"
#include "test_support.hpp"
#include "trigger_descent/lipschitz_step.hpp"
#include "trigger_descent/problems.hpp"
#include "trigger_descent/trace.hpp"

using namespace trigger_descent;
using testing::make_worked_example;
using testing::make_quadratic;

namespace {

// Hand trace with consistent tau bookkeeping: accepted records consume the
// next value of Facc; rejected records observe a value above the threshold.
RunTrace hand_trace(double F0, const std::vector<bool>& acc,
                    const std::vector<double>& Facc, int w) {
  RunTrace t;
  t.F_theta0 = F0;
  ObjectiveWindow win;
  win.init(F0);
  std::size_t ai = 0;
  double theta = 0.0;
  for (std::size_t k = 0; k < acc.size(); ++k) {
    OuterRecord r;
    r.k = static_cast<long long>(k);
    r.accepted = acc[k];
    r.trigger_reason = TriggerReason::Distance;
    r.j_trigger = 1;
    r.tau_obj_before = win.tau_obj;
    if (acc[k]) {
      r.F_trigger = Facc.at(ai++);
      theta += 1.0;
      win = update_window(win, r.F_trigger, w);
    } else {
      r.F_trigger = win.tau_obj + 1.0;
    }
    r.theta_after = {theta};
    r.grad_norm_after = 1.0;
    r.delta_after = 1.0;
    t.records.push_back(r);
  }
  return t;
}

Problem suite_problem(const std::string& name) {
  for (const auto& p : builtin_suite()) {
    if (p.name == name) return p;
  }
  throw std::logic_error("missing suite problem " + name);
}

}  // namespace

TEST_CASE("distinct_indices lists theta0 and each acceptance") {
  CHECK_EQ(distinct_indices(hand_trace(1.0, {true}, {0.5}, 2)),
           std::vector<long long>{0, 1});
  CHECK_EQ(distinct_indices(hand_trace(1.0, {false, false, true}, {0.5}, 2)),
           std::vector<long long>{0, 3});
  CHECK_EQ(distinct_indices(hand_trace(1.0, {false, false}, {}, 2)),
           std::vector<long long>{0});
  RunTrace empty;
  empty.F_theta0 = 1.0;
  CHECK_EQ(distinct_indices(empty), std::vector<long long>{0});
}

TEST_CASE("l_of_k counts acceptances before or at each k") {
  SUBCASE("mixed pattern") {
    RunTrace t = hand_trace(1.0, {false, false, true}, {0.5}, 2);
    CHECK_EQ(l_of_k(t), std::vector<long long>{0, 0, 0, 1});
  }
  SUBCASE("every iteration accepted") {
    RunTrace t = hand_trace(5.0, {true, true, true}, {4.0, 3.0, 2.0}, 2);
    CHECK_EQ(l_of_k(t), std::vector<long long>{0, 1, 2, 3});
  }
}

TEST_CASE("objective_at_distinct prefixes F(theta0)") {
  RunTrace t = hand_trace(5.0, {true, false, true}, {4.0, 3.0}, 2);
  CHECK_EQ(objective_at_distinct(t), std::vector<double>{5.0, 4.0, 3.0});
}

TEST_CASE("o_of_k on monotone acceptances hits the window edge") {
  // Strictly decreasing accepted values: tau is the oldest window entry, so
  // O(k) = max(L(k) - w + 1, 0).
  std::vector<bool> acc(8, true);
  std::vector<double> F{10, 9, 8, 7, 6, 5, 4, 3};
  RunTrace t = hand_trace(11.0, acc, F, 3);
  const auto L = l_of_k(t);
  const auto O = o_of_k(t, 3);
  REQUIRE_EQ(O.size(), L.size());
  for (std::size_t k = 0; k < O.size(); ++k) {
    CHECK_EQ(O[k], std::max<long long>(L[k] - 2, 0));
  }

  SUBCASE("w=1 collapses O onto L") {
    const auto O1 = o_of_k(t, 1);
    for (std::size_t k = 0; k < O1.size(); ++k) CHECK_EQ(O1[k], L[k]);
  }
}

TEST_CASE("o_sequence with w=1 walks every distinct iterate") {
  RunTrace t = hand_trace(5.0, {true, true, true}, {4.0, 3.0, 2.0}, 1);
  CHECK_EQ(o_sequence(t, 1), std::vector<long long>{0, 1, 2, 3});
  const auto g = g_sequence(t, 1);
  REQUIRE(!g.empty());
  for (std::size_t u = 1; u < g.size(); ++u) CHECK(g[u] - g[u - 1] >= 1);
}

TEST_CASE("frozen 24-iteration example reproduces every published row") {
  const auto fig = make_worked_example();
  REQUIRE_EQ(fig.trace.records.size(), 24);

  CHECK_EQ(distinct_indices(fig.trace), fig.expected_l);
  CHECK_EQ(objective_at_distinct(fig.trace), fig.expected_F_distinct);
  CHECK_EQ(l_of_k(fig.trace), fig.expected_L);
  CHECK_EQ(tau_ladder(fig.trace, fig.w), fig.expected_tau);
  CHECK_EQ(o_of_k(fig.trace, fig.w), fig.expected_O);
  CHECK_EQ(o_sequence(fig.trace, fig.w), fig.expected_o);
  CHECK_EQ(g_sequence(fig.trace, fig.w), fig.expected_g);

  // Recorded thresholds agree with reconstruction, so the full descent
  // verification holds on the fixture.
  DescentReport rep = verify_descent(fig.trace, fig.w);
  CHECK(rep.all());
  CHECK(rep.violations.empty());
}

TEST_CASE("verify_descent passes on real novel runs") {
  SUBCASE("sphere with the production window") {
    const Problem& p = suite_problem("sphere");
    RunResult r = solve_novel(p, p.standard_start);
    REQUIRE(is_successful(r.status));
    DescentReport rep = verify_descent(r.trace, 10);
    CHECK(rep.all());
  }
  SUBCASE("rosenbrock across window sizes") {
    const Problem& p = suite_problem("rosenbrock_2");
    for (int w : {1, 3, 10}) {
      RunResult r = solve_novel(p, p.standard_start, 1e-5, 20000, w);
      REQUIRE(is_successful(r.status));
      DescentReport rep = verify_descent(r.trace, w);
      CHECK(rep.all_clauses());
      CHECK(rep.pass_window);
    }
  }
  SUBCASE("w=1 forces strict descent over distinct iterates") {
    const Problem& p = suite_problem("rosenbrock_2");
    RunResult r = solve_novel(p, p.standard_start, 1e-5, 20000, 1);
    REQUIRE(is_successful(r.status));
    const auto F = objective_at_distinct(r.trace);
    for (std::size_t s = 1; s < F.size(); ++s) CHECK(F[s] < F[s - 1]);
  }
}

TEST_CASE("verify_descent flags injected violations") {
  SUBCASE("breaking milestone monotonicity") {
    auto fig = make_worked_example();
    for (auto& rec : fig.trace.records) {
      if (rec.accepted && rec.F_trigger == 0.5) rec.F_trigger = 5.0;
    }
    DescentReport rep = verify_descent(fig.trace, fig.w);
    CHECK_FALSE(rep.all());
    CHECK_FALSE(rep.pass_a);
    CHECK(!rep.violations.empty());
  }
  SUBCASE("tampering with a recorded threshold") {
    const Problem& p = suite_problem("sphere");
    RunResult r = solve_novel(p, p.standard_start);
    REQUIRE(r.trace.records.size() >= 3);
    r.trace.records[2].tau_obj_before += 0.125;
    DescentReport rep = verify_descent(r.trace, 10);
    CHECK(rep.all_clauses());   // objective-only clauses unaffected
    CHECK_FALSE(rep.pass_window);
    CHECK_FALSE(rep.all());
  }
}

TEST_CASE("write_trace_jsonl emits one object per line") {
  RunTrace t = hand_trace(4.0, {true, false}, {2.0}, 3);
  std::ostringstream out;
  write_trace_jsonl(t, out);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK_EQ(line, "{\"F_theta0\":4}");
  REQUIRE(std::getline(in, line));
  CHECK(line.find("\"k\":0") != std::string::npos);
  CHECK(line.find("\"accepted\":true") != std::string::npos);
  CHECK(line.find("\"theta_after\":[1]") != std::string::npos);
  CHECK(line.find("\"tau_obj_before\":4") != std::string::npos);
  REQUIRE(std::getline(in, line));
  CHECK(line.find("\"accepted\":false") != std::string::npos);
  CHECK_FALSE(std::getline(in, line));  // exactly records + 1 lines
}
